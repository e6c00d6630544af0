// Copyright 2026 The Collapse Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COLLAPSE_LAB_TOLERANCES_H
#define COLLAPSE_LAB_TOLERANCES_H

// Every numerical threshold used by the library lives here.

namespace collapse_lab::tol {

/// Single algebraic operation (hermiticity, idempotence, norm after normalize).
inline constexpr double kAlgebraic = 1e-12;
/// Quantities accumulated over many operations (probability sums, unitarity).
inline constexpr double kAccumulated = 1e-10;
/// Relative <H> drift allowed over a unitary-only segment.
inline constexpr double kEnergyDrift = 1e-8;
/// Squared norm below which a vector cannot be normalized.
inline constexpr double kZeroNormSquared = 1e-30;
/// Born weight at or below which a projection is a null outcome.
inline constexpr double kNullOutcome = 1e-15;
/// Shift magnitudes above this emit a calibration warning.
inline constexpr double kShiftMagnitudeWarn = 1e-3;
/// Largest marginal shift accepted by the no-signaling experiment.
inline constexpr double kNoSignalingMax = 0.01;
/// Number of standard deviations used by every statistical pass criterion.
inline constexpr double kSigmas = 3.0;

}  // namespace collapse_lab::tol

#endif
