#pragma once

#include "sievelab/am2.hpp"
#include "sievelab/arithmetic.hpp"
#include "sievelab/dirichlet.hpp"
#include "sievelab/errors.hpp"
#include "sievelab/large_sieve.hpp"
#include "sievelab/numeric.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/progressions.hpp"
#include "sievelab/report.hpp"
#include "sievelab/sparse_sets.hpp"
