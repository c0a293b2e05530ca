// SPDX-FileCopyrightText: 2026 kacgap contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "kacgap/collision_models.hpp"
#include "kacgap/errors.hpp"
#include "kacgap/exact_verifier.hpp"
#include "kacgap/gap_engine.hpp"
#include "kacgap/json_io.hpp"
#include "kacgap/k_spectra.hpp"
#include "kacgap/quadrature.hpp"
#include "kacgap/walk_simulator.hpp"
