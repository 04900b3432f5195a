#pragma once

#include "analytic.hpp"
#include "distribution.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "oracle.hpp"
#include "pruning.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "tree.hpp"
