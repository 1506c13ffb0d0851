// Copyright (c) 2026 The bayesdet Authors
// Licensed under the Apache 2.0 license found in the LICENSE file or at:
//     https://opensource.org/licenses/Apache-2.0

#pragma once

#include "bayesdet/bayes.hpp"
#include "bayesdet/errors.hpp"
#include "bayesdet/monte_carlo.hpp"
#include "bayesdet/probability.hpp"
#include "bayesdet/random.hpp"
#include "bayesdet/roc.hpp"
#include "bayesdet/signal_models.hpp"
#include "bayesdet/special_functions.hpp"
