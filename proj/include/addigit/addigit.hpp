#pragma once

// Umbrella header.

#include "addigit/additive.hpp"
#include "addigit/blocks.hpp"
#include "addigit/classify.hpp"
#include "addigit/csv.hpp"
#include "addigit/digits.hpp"
#include "addigit/errors.hpp"
#include "addigit/expsum.hpp"
#include "addigit/factor.hpp"
#include "addigit/parallel.hpp"
#include "addigit/primes.hpp"
#include "addigit/sieve.hpp"
