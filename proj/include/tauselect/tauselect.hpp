// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_TAUSELECT_HPP_
#define TAUSELECT_TAUSELECT_HPP_

#include "tauselect/common.hpp"
#include "tauselect/cross_validation.hpp"
#include "tauselect/dataset.hpp"
#include "tauselect/elastic_net.hpp"
#include "tauselect/evaluation.hpp"
#include "tauselect/gbt.hpp"
#include "tauselect/harness.hpp"
#include "tauselect/learners.hpp"
#include "tauselect/matching.hpp"
#include "tauselect/meta_learners.hpp"
#include "tauselect/metrics.hpp"
#include "tauselect/nuisance.hpp"
#include "tauselect/random.hpp"
#include "tauselect/scenarios.hpp"

#endif  // TAUSELECT_TAUSELECT_HPP_
