// Copyright 2026 The slowdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "slowdiff/core.hpp"

namespace slowdiff
{

struct InfConvSpec
{
  double epsilon = 0.1;
  Cylinder domain;  // infimum ranges over grid nodes inside; output lives on those nodes
};

enum class InfConvMethod
{
  BruteForce,
  LowerEnvelope  // dimension-wise sweeps over lower envelopes of parabolas
};

// v_eps(x, t) = min over nodes (y, tau) of v(y, tau) + (|x - y|^2 + |t - tau|^2) / (2 eps).
// Both methods evaluate fl(fl(v + q_x) + q_y) + q_t in the same order, so their outputs
// agree bit for bit.
ScalarField inf_convolve(const ScalarField &field, const InfConvSpec &spec,
                         InfConvMethod method = InfConvMethod::BruteForce);

}  // namespace slowdiff
