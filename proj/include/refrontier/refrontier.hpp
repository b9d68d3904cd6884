#pragma once

#include "refrontier/error.hpp"
#include "refrontier/matrix.hpp"
#include "refrontier/kernel.hpp"
#include "refrontier/scc.hpp"
#include "refrontier/spectral.hpp"
#include "refrontier/decomposition.hpp"
#include "refrontier/cost.hpp"
#include "refrontier/independent.hpp"
#include "refrontier/frontier.hpp"
#include "refrontier/cordon.hpp"
#include "refrontier/dynamics.hpp"
