/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: include/facekit/fit/fitting.hpp
 *
 * Copyright 2026 The facekit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef FACEKIT_FIT_FITTING_HPP
#define FACEKIT_FIT_FITTING_HPP

#include "facekit/core/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace facekit {
namespace fitting {

struct FitConfig
{
    int max_iterations = 200;        // accepted-step budget
    double convergence_tol = 1e-8;   // relative cost decrease
    double damping_init = 1e-3;      // Levenberg seed
    double id_regularization = 1e-4;
    double exp_regularization = 1e-3;
    int meta_k = 3;                  // lookahead steps per branch
    double meta_test_fraction = 0.25;
    std::uint64_t rng_seed = 0;      // meta train/test split

    /// Throws ConfigError on unusable values.
    void validate() const;
};

enum class Branch
{
    Vdc,
    Wpdc,
};

/// One meta-iteration decision with the held-out errors of both candidates
/// (kept so the selection can be replayed and audited).
struct BranchRecord
{
    Branch chosen = Branch::Wpdc;
    double vdc_meta_error = 0.0;
    double wpdc_meta_error = 0.0;
};

struct FitResult
{
    model::ModelParams params;
    double final_cost = 0.0;
    int iterations = 0;              // accepted steps
    std::vector<double> cost_trace;  // objective after each accepted step
    std::vector<BranchRecord> branch_trace;
    bool converged = false;
    std::string diagnostic;          // non-empty when converged is false
};

/**
 * Vertex distance cost: mean squared Euclidean distance between the
 * projected vertices of the two parameter sets, over all model vertices.
 */
double vdc(const model::MorphableBasis& basis, const model::ModelParams& params_pred,
           const model::ModelParams& params_gt);

/**
 * Per-parameter importance weights: weight_i is the norm of the projected
 * vertex displacement caused by replacing only the i-th flattened parameter
 * of params_gt with the predicted value, normalized by the maximum weight.
 * When the prediction equals the ground truth everywhere the weights fall
 * back to uniform 1/P.
 */
Eigen::VectorXd wpdc_weights(const model::MorphableBasis& basis, const model::ModelParams& params_pred,
                             const model::ModelParams& params_gt);

/// Weighted parameter distance cost: sum_i weight_i (pred_i - gt_i)^2.
double wpdc(const model::MorphableBasis& basis, const model::ModelParams& params_pred,
            const model::ModelParams& params_gt);

enum class FitObjective
{
    LandmarkLsq,
};

/**
 * Levenberg-Marquardt fit of ModelParams to observed 2D landmarks:
 * minimizes sum_j |landmark_j(p) - observed_j|^2
 *           + id_regularization |id|^2 + exp_regularization |exp|^2
 * with an analytic Jacobian. Starts from initial when given, otherwise from
 * the neutral pose.
 *
 * Errors: fewer than 4 landmarks (under-constrained), non-finite input, a
 * count mismatch with the basis landmarks, or all landmarks coincident
 * (DegenerateGeometryError). Running out of budget without converging is
 * not an error: the best parameters are returned with converged = false.
 */
FitResult fit_landmarks(const model::MorphableBasis& basis, const std::vector<model::Vec2>& observed,
                        const FitConfig& config, FitObjective objective = FitObjective::LandmarkLsq,
                        const std::optional<model::ModelParams>& initial = std::nullopt);

/**
 * Meta-joint fitting. Landmarks are split by seeded RNG into meta-train and
 * meta-test subsets. Each meta-iteration anchors both costs at the
 * incumbent estimate (params_gt_proxy initially) and runs meta_k
 * Levenberg-Marquardt steps on the meta-train objective under each of two
 * step geometries:
 *
 *   - the VDC branch damps the step with the anchor's per-parameter vertex
 *     sensitivity (the diagonal of the full-vertex Gauss-Newton metric), a
 *     trust region in vertex distance;
 *   - the WPDC branch damps with wpdc_weights of the current deviation from
 *     the anchor, a trust region in weighted parameter distance.
 *
 * The candidate with the strictly lower meta-test reprojection error is
 * kept (ties go to the WPDC branch), every decision lands in branch_trace,
 * and the anchor is refreshed to the winner.
 */
FitResult meta_joint_fit(const model::MorphableBasis& basis, const std::vector<model::Vec2>& observed,
                         const model::ModelParams& params_gt_proxy, const FitConfig& config);

/*
 * The pieces below are the building blocks of the two fitters, exposed so
 * tests can check the analytic Jacobian against finite differences and
 * replay meta-joint branch decisions.
 */

/// Residual of the landmark objective at params, restricted to the landmark
/// slots in `subset` (data rows in subset order, then regularizer rows).
Eigen::VectorXd landmark_residual(const model::MorphableBasis& basis, const model::ModelParams& params,
                                  const std::vector<model::Vec2>& observed,
                                  const std::vector<int>& subset, double id_regularization,
                                  double exp_regularization);

/// Analytic Jacobian of landmark_residual with respect to the flattened
/// parameters [scale, pitch, yaw, roll, t_x, t_y, id..., exp...].
Eigen::MatrixXd landmark_jacobian(const model::MorphableBasis& basis, const model::ModelParams& params,
                                  const std::vector<model::Vec2>& observed,
                                  const std::vector<int>& subset, double id_regularization,
                                  double exp_regularization);

/// Mean squared reprojection error over a landmark subset (no regularizer).
double subset_reprojection_error(const model::MorphableBasis& basis, const model::ModelParams& params,
                                 const std::vector<model::Vec2>& observed,
                                 const std::vector<int>& subset);

/// Seeded meta train/test split of landmark slots 0..count-1; both halves
/// come back sorted. Throws ConfigError when the test side is smaller than 2.
std::pair<std::vector<int>, std::vector<int>> meta_split(int count, double test_fraction,
                                                         std::uint64_t seed);

struct BranchOutcome
{
    model::ModelParams params;
    double damping = 0.0;            // Levenberg lambda after the steps
    int accepted = 0;
    std::vector<double> cost_trace;  // train objective after each accepted step
};

/// Runs meta_k steps of one branch from `start` with the cost anchored at
/// `anchor`; deterministic, and reused by the replay oracle in the tests.
BranchOutcome run_branch_steps(const model::MorphableBasis& basis,
                               const std::vector<model::Vec2>& observed,
                               const std::vector<int>& train_subset, const model::ModelParams& start,
                               const model::ModelParams& anchor, Branch branch, double damping_in,
                               const FitConfig& config);

} // namespace fitting
} // namespace facekit

#endif // FACEKIT_FIT_FITTING_HPP
