#pragma once

// Umbrella header for the Riemannian minimax solver library: manifold and
// proximal primitives, problem families, the adaptively smoothed solver with
// its certificates, the single-loop baselines, evaluation metrics, the
// benchmark harness, and the invariant self-tests.

#include "rada/manifold.hpp"
#include "rada/prox.hpp"
#include "rada/problem.hpp"
#include "rada/data.hpp"
#include "rada/solver.hpp"
#include "rada/baselines.hpp"
#include "rada/metrics.hpp"
#include "rada/experiment.hpp"
#include "rada/selftest.hpp"
