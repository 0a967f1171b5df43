#pragma once

// Umbrella header for the analysis library (no service or CLI dependencies).

#include "apv/analysis.hpp"
#include "apv/ballot_log.hpp"
#include "apv/chi_square.hpp"
#include "apv/comparison.hpp"
#include "apv/completion.hpp"
#include "apv/election.hpp"
#include "apv/errors.hpp"
#include "apv/expected_utility.hpp"
#include "apv/random.hpp"
#include "apv/rational.hpp"
#include "apv/scenario.hpp"
#include "apv/strategy.hpp"
