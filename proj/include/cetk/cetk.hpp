#pragma once

#include "cetk/analysis.hpp"
#include "cetk/ce.hpp"
#include "cetk/copula.hpp"
#include "cetk/dataset.hpp"
#include "cetk/error.hpp"
#include "cetk/hypothesis.hpp"
#include "cetk/knn.hpp"
#include "cetk/parallel.hpp"
#include "cetk/rng.hpp"
#include "cetk/scenario.hpp"
#include "cetk/simlab.hpp"
#include "cetk/special.hpp"
