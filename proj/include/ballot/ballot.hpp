#pragma once

#include "ballot/errors.hpp"
#include "ballot/rational.hpp"
#include "ballot/election.hpp"
#include "ballot/election_io.hpp"
#include "ballot/rules.hpp"
#include "ballot/oracles.hpp"
#include "ballot/sampling.hpp"
#include "ballot/plan.hpp"
#include "ballot/predictors.hpp"
#include "ballot/mov_estimators.hpp"
#include "ballot/generators.hpp"
#include "ballot/harness.hpp"
