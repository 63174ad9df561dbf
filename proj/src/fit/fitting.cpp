/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/fit/fitting.cpp
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
#include "facekit/fit/fitting.hpp"

#include "facekit/core/error.hpp"
#include "facekit/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>

namespace facekit {
namespace fitting {

namespace {

constexpr double kLambdaMin = 1e-15;
constexpr double kLambdaMax = 1e15;
constexpr int kMaxInnerAttempts = 60;
constexpr double kDampingFloor = 1e-8;

void check_observed(const model::MorphableBasis& basis, const std::vector<model::Vec2>& observed)
{
    if (observed.size() != basis.landmark_indices.size())
        throw InvalidArgumentError("observed landmark count " + std::to_string(observed.size()) +
                                   " does not match the basis landmark count " +
                                   std::to_string(basis.landmark_indices.size()));
    if (observed.size() < 4)
        throw InvalidArgumentError("under-constrained: at least 4 landmarks are required, got " +
                                   std::to_string(observed.size()));
    double min_x = std::numeric_limits<double>::max(), max_x = std::numeric_limits<double>::lowest();
    double min_y = min_x, max_y = max_x;
    for (const auto& p : observed)
    {
        if (!p.allFinite())
            throw InvalidArgumentError("observed landmarks contain non-finite values");
        min_x = std::min(min_x, p.x());
        max_x = std::max(max_x, p.x());
        min_y = std::min(min_y, p.y());
        max_y = std::max(max_y, p.y());
    }
    if (max_x - min_x == 0.0 && max_y - min_y == 0.0)
        throw DegenerateGeometryError("all observed landmarks coincide; the pose is unobservable");
}

void check_params(const model::MorphableBasis& basis, const model::ModelParams& params,
                  const char* what)
{
    if (params.id_coeffs.size() != basis.id_basis.cols() ||
        params.exp_coeffs.size() != basis.exp_basis.cols())
        throw InvalidArgumentError(std::string(what) + ": coefficient lengths do not match the basis");
}

// Gathered per-landmark basis data so residual/Jacobian evaluations touch
// only 3L rows.
struct LandmarkSlice
{
    Eigen::MatrixXd mean;     // 3 x L
    Eigen::MatrixXd id_cols;  // 3L x K_id
    Eigen::MatrixXd exp_cols; // 3L x K_exp
};

LandmarkSlice gather_landmarks(const model::MorphableBasis& basis)
{
    const int l = static_cast<int>(basis.landmark_indices.size());
    LandmarkSlice s;
    s.mean.resize(3, l);
    s.id_cols.resize(3 * l, basis.id_basis.cols());
    s.exp_cols.resize(3 * l, basis.exp_basis.cols());
    for (int j = 0; j < l; ++j)
    {
        const auto vi = basis.landmark_indices[j];
        for (int a = 0; a < 3; ++a)
        {
            s.mean(a, j) = basis.mean_shape[3 * vi + a];
            s.id_cols.row(3 * j + a) = basis.id_basis.row(3 * vi + a);
            s.exp_cols.row(3 * j + a) = basis.exp_basis.row(3 * vi + a);
        }
    }
    return s;
}

Eigen::Vector3d landmark_vertex(const LandmarkSlice& slice, const model::ModelParams& p, int j)
{
    Eigen::Vector3d v = slice.mean.col(j);
    v += slice.id_cols.middleRows(3 * j, 3) * p.id_coeffs;
    v += slice.exp_cols.middleRows(3 * j, 3) * p.exp_coeffs;
    return v;
}

// The least-squares problem shared by both fitters: data rows over a subset
// of landmark slots plus regularizer rows.
class LandmarkProblem
{
public:
    LandmarkProblem(const model::MorphableBasis& basis, const std::vector<model::Vec2>& observed,
                    std::vector<int> subset, double lambda_id, double lambda_exp)
        : basis_(basis), observed_(observed), subset_(std::move(subset)),
          slice_(gather_landmarks(basis)), sqrt_id_(std::sqrt(lambda_id)),
          sqrt_exp_(std::sqrt(lambda_exp))
    {
    }

    int residual_size() const
    {
        return 2 * static_cast<int>(subset_.size()) + basis_.num_id_coeffs() + basis_.num_exp_coeffs();
    }

    Eigen::VectorXd residual(const model::ModelParams& p) const
    {
        // evaluated through landmark_positions so observations generated by
        // the projection pipeline reproduce bit-for-bit at the true params
        const auto positions = model::landmark_positions(basis_, p);
        Eigen::VectorXd res(residual_size());
        int row = 0;
        for (const int j : subset_)
        {
            res[row++] = positions[j].x() - observed_[j].x();
            res[row++] = positions[j].y() - observed_[j].y();
        }
        for (Eigen::Index k = 0; k < p.id_coeffs.size(); ++k)
            res[row++] = sqrt_id_ * p.id_coeffs[k];
        for (Eigen::Index k = 0; k < p.exp_coeffs.size(); ++k)
            res[row++] = sqrt_exp_ * p.exp_coeffs[k];
        return res;
    }

    Eigen::MatrixXd jacobian(const model::ModelParams& p) const
    {
        const int num_id = basis_.num_id_coeffs();
        const int num_exp = basis_.num_exp_coeffs();
        const int cols = 6 + num_id + num_exp;
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(residual_size(), cols);

        const model::RotationMatrix r = model::rotation_from_euler(p.pitch, p.yaw, p.roll);
        model::RotationMatrix dr_pitch, dr_yaw, dr_roll;
        model::rotation_derivatives(p.pitch, p.yaw, p.roll, dr_pitch, dr_yaw, dr_roll);

        int row = 0;
        for (const int j : subset_)
        {
            const Eigen::Vector3d v = landmark_vertex(slice_, p, j);
            const Eigen::Vector3d rv = r * v;

            jac(row, 0) = rv.x();
            jac(row + 1, 0) = rv.y();
            const Eigen::Vector3d dp = dr_pitch * v, dy = dr_yaw * v, dr = dr_roll * v;
            jac(row, 1) = p.scale * dp.x();
            jac(row + 1, 1) = p.scale * dp.y();
            jac(row, 2) = p.scale * dy.x();
            jac(row + 1, 2) = p.scale * dy.y();
            jac(row, 3) = p.scale * dr.x();
            jac(row + 1, 3) = p.scale * dr.y();
            jac(row, 4) = 1.0;
            jac(row + 1, 5) = 1.0;

            // coefficient columns: scale * (first two rows of R * basis column)
            const auto id_block = slice_.id_cols.middleRows(3 * j, 3);   // 3 x K_id
            const auto exp_block = slice_.exp_cols.middleRows(3 * j, 3); // 3 x K_exp
            jac.block(row, 6, 2, num_id) = p.scale * (r.topRows(2) * id_block);
            jac.block(row, 6 + num_id, 2, num_exp) = p.scale * (r.topRows(2) * exp_block);
            row += 2;
        }
        for (int k = 0; k < num_id; ++k)
            jac(row + k, 6 + k) = sqrt_id_;
        for (int k = 0; k < num_exp; ++k)
            jac(row + num_id + k, 6 + num_id + k) = sqrt_exp_;
        return jac;
    }

    double cost(const model::ModelParams& p) const { return residual(p).squaredNorm(); }

    const std::vector<int>& subset() const { return subset_; }

private:
    const model::MorphableBasis& basis_;
    const std::vector<model::Vec2>& observed_;
    std::vector<int> subset_;
    LandmarkSlice slice_;
    double sqrt_id_, sqrt_exp_;
};

std::vector<int> all_slots(std::size_t count)
{
    std::vector<int> v(count);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

bool params_usable(const Eigen::VectorXd& flat)
{
    return flat.allFinite() && flat[0] > 0.0;
}

// Linearization of the problem at one iterate, built once per iteration.
struct Linearization
{
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;

    Linearization(const LandmarkProblem& problem, const model::ModelParams& p)
    {
        const Eigen::MatrixXd jac = problem.jacobian(p);
        const Eigen::VectorXd res = problem.residual(p);
        grad = jac.transpose() * res;
        hess = jac.transpose() * jac;
    }

    bool gradient_flat(double cost) const
    {
        return grad.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + cost);
    }

    /// Marquardt scaling: diag(J^T J) clamped away from zero.
    Eigen::VectorXd marquardt_diag() const
    {
        const Eigen::VectorXd d = hess.diagonal();
        const double floor = std::max(d.maxCoeff() * kDampingFloor, 1e-12);
        return d.cwiseMax(floor);
    }
};

// One damped Gauss-Newton step with retry-on-increase. Returns false when
// no damping value in range produces a cost decrease.
bool lm_step(const LandmarkProblem& problem, const Linearization& lin, model::ModelParams& p,
             double& cost, double& lambda, const Eigen::VectorXd& damping_diag, int num_id,
             int num_exp)
{
    const Eigen::VectorXd flat = p.flatten();
    for (int attempt = 0; attempt < kMaxInnerAttempts; ++attempt)
    {
        Eigen::MatrixXd lhs = lin.hess;
        lhs.diagonal() += lambda * damping_diag;
        const Eigen::VectorXd step = lhs.ldlt().solve(-lin.grad);
        const Eigen::VectorXd cand_flat = flat + step;
        if (params_usable(cand_flat))
        {
            const model::ModelParams cand = model::ModelParams::unflatten(cand_flat, num_id, num_exp);
            const double cand_cost = problem.cost(cand);
            if (cand_cost < cost)
            {
                p = cand;
                cost = cand_cost;
                lambda = std::max(lambda / 3.0, kLambdaMin);
                return true;
            }
        }
        if (lambda >= kLambdaMax)
            return false;
        lambda = std::min(lambda * 4.0, kLambdaMax);
    }
    return false;
}

// Diagonal of the full-vertex Gauss-Newton metric (1/N) J_V^T J_V at
// `params`, normalized to unit maximum: the per-parameter sensitivity of
// the vertex distance cost.
Eigen::VectorXd vertex_sensitivity_diag(const model::MorphableBasis& basis,
                                        const model::ModelParams& params)
{
    const int num_id = basis.num_id_coeffs();
    const int num_exp = basis.num_exp_coeffs();
    const int cols = 6 + num_id + num_exp;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(cols);

    const model::FaceMesh mesh = model::synthesize_shape(basis, params.id_coeffs, params.exp_coeffs);
    const model::RotationMatrix r = model::rotation_from_euler(params.pitch, params.yaw, params.roll);
    model::RotationMatrix dr_pitch, dr_yaw, dr_roll;
    model::rotation_derivatives(params.pitch, params.yaw, params.roll, dr_pitch, dr_yaw, dr_roll);

    const std::size_t n = mesh.vertex_count();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Eigen::Vector3d v = mesh.vertex(i);
        const Eigen::Vector3d rv = r * v;
        diag[0] += rv.x() * rv.x() + rv.y() * rv.y();
        const Eigen::Vector3d dp = dr_pitch * v, dy = dr_yaw * v, dr = dr_roll * v;
        diag[1] += params.scale * params.scale * (dp.x() * dp.x() + dp.y() * dp.y());
        diag[2] += params.scale * params.scale * (dy.x() * dy.x() + dy.y() * dy.y());
        diag[3] += params.scale * params.scale * (dr.x() * dr.x() + dr.y() * dr.y());
        diag[4] += 1.0;
        diag[5] += 1.0;
        for (int k = 0; k < num_id; ++k)
        {
            const Eigen::Vector3d col(basis.id_basis(3 * i, k), basis.id_basis(3 * i + 1, k),
                                      basis.id_basis(3 * i + 2, k));
            const Eigen::Vector3d rc = r * col;
            diag[6 + k] += params.scale * params.scale * (rc.x() * rc.x() + rc.y() * rc.y());
        }
        for (int k = 0; k < num_exp; ++k)
        {
            const Eigen::Vector3d col(basis.exp_basis(3 * i, k), basis.exp_basis(3 * i + 1, k),
                                      basis.exp_basis(3 * i + 2, k));
            const Eigen::Vector3d rc = r * col;
            diag[6 + num_id + k] += params.scale * params.scale * (rc.x() * rc.x() + rc.y() * rc.y());
        }
    }
    diag /= static_cast<double>(n);
    const double top = diag.maxCoeff();
    if (top > 0.0)
        diag /= top;
    return diag.cwiseMax(kDampingFloor);
}

} // namespace

void FitConfig::validate() const
{
    if (max_iterations < 1)
        throw ConfigError("max_iterations must be >= 1");
    if (!(convergence_tol > 0.0))
        throw ConfigError("convergence_tol must be > 0");
    if (!(damping_init > 0.0))
        throw ConfigError("damping_init must be > 0");
    if (id_regularization < 0.0 || exp_regularization < 0.0)
        throw ConfigError("regularization weights must be >= 0");
    if (meta_k < 1)
        throw ConfigError("meta_k must be >= 1");
    if (!(meta_test_fraction > 0.0 && meta_test_fraction < 1.0))
        throw ConfigError("meta_test_fraction must lie in (0, 1)");
}

double vdc(const model::MorphableBasis& basis, const model::ModelParams& params_pred,
           const model::ModelParams& params_gt)
{
    check_params(basis, params_pred, "vdc(params_pred)");
    check_params(basis, params_gt, "vdc(params_gt)");

    const auto pred = model::project_model(basis, params_pred);
    const auto gt = model::project_model(basis, params_gt);
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        total += (pred[i] - gt[i]).squaredNorm();
    return total / static_cast<double>(pred.size());
}

Eigen::VectorXd wpdc_weights(const model::MorphableBasis& basis, const model::ModelParams& params_pred,
                             const model::ModelParams& params_gt)
{
    check_params(basis, params_pred, "wpdc_weights(params_pred)");
    check_params(basis, params_gt, "wpdc_weights(params_gt)");

    const Eigen::VectorXd flat_pred = params_pred.flatten();
    const Eigen::VectorXd flat_gt = params_gt.flatten();
    const int p = static_cast<int>(flat_gt.size());
    const int num_id = basis.num_id_coeffs();
    const int num_exp = basis.num_exp_coeffs();

    std::vector<double> base_xy;
    {
        const model::FaceMesh gt_mesh = model::synthesize_shape(basis, params_gt.id_coeffs,
                                                                params_gt.exp_coeffs);
        const model::RotationMatrix r = model::rotation_from_euler(params_gt.pitch, params_gt.yaw,
                                                                   params_gt.roll);
        model::project_vertices_flat(gt_mesh.vertices, params_gt.scale, r, params_gt.translation,
                                     base_xy, nullptr);
    }

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(p);
    std::vector<double> xy;
    for (int i = 0; i < p; ++i)
    {
        if (flat_pred[i] == flat_gt[i])
            continue; // no substitution, zero displacement
        Eigen::VectorXd flat_sub = flat_gt;
        flat_sub[i] = flat_pred[i];
        const model::ModelParams sub = model::ModelParams::unflatten(flat_sub, num_id, num_exp);
        if (!(sub.scale > 0.0))
        {
            // a non-positive substituted scale cannot be projected; its
            // displacement is measured against a collapsed-to-zero scale
            weights[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        const model::FaceMesh mesh = model::synthesize_shape(basis, sub.id_coeffs, sub.exp_coeffs);
        const model::RotationMatrix r = model::rotation_from_euler(sub.pitch, sub.yaw, sub.roll);
        model::project_vertices_flat(mesh.vertices, sub.scale, r, sub.translation, xy, nullptr);

        double sq = 0.0;
        for (std::size_t k = 0; k < xy.size(); ++k)
        {
            const double d = xy[k] - base_xy[k];
            sq += d * d;
        }
        weights[i] = std::sqrt(sq);
    }

    const double top = weights.maxCoeff();
    if (top == 0.0)
        return Eigen::VectorXd::Constant(p, 1.0 / p);
    if (std::isinf(top))
    {
        // degenerate substitution dominates; weight it 1, others relative to
        // the largest finite displacement
        double finite_top = 0.0;
        for (int i = 0; i < p; ++i)
            if (std::isfinite(weights[i]))
                finite_top = std::max(finite_top, weights[i]);
        for (int i = 0; i < p; ++i)
            weights[i] = std::isinf(weights[i]) ? 1.0
                                                : (finite_top > 0.0 ? weights[i] / finite_top : 0.0);
        return weights;
    }
    return weights / top;
}

double wpdc(const model::MorphableBasis& basis, const model::ModelParams& params_pred,
            const model::ModelParams& params_gt)
{
    const Eigen::VectorXd w = wpdc_weights(basis, params_pred, params_gt);
    const Eigen::VectorXd diff = params_pred.flatten() - params_gt.flatten();
    return (w.array() * diff.array().square()).sum();
}

Eigen::VectorXd landmark_residual(const model::MorphableBasis& basis, const model::ModelParams& params,
                                  const std::vector<model::Vec2>& observed,
                                  const std::vector<int>& subset, double id_regularization,
                                  double exp_regularization)
{
    check_params(basis, params, "landmark_residual");
    return LandmarkProblem(basis, observed, subset, id_regularization, exp_regularization)
        .residual(params);
}

Eigen::MatrixXd landmark_jacobian(const model::MorphableBasis& basis, const model::ModelParams& params,
                                  const std::vector<model::Vec2>& observed,
                                  const std::vector<int>& subset, double id_regularization,
                                  double exp_regularization)
{
    check_params(basis, params, "landmark_jacobian");
    return LandmarkProblem(basis, observed, subset, id_regularization, exp_regularization)
        .jacobian(params);
}

double subset_reprojection_error(const model::MorphableBasis& basis, const model::ModelParams& params,
                                 const std::vector<model::Vec2>& observed,
                                 const std::vector<int>& subset)
{
    if (subset.empty())
        throw InvalidArgumentError("subset_reprojection_error: empty subset");
    const auto positions = model::landmark_positions(basis, params);
    double total = 0.0;
    for (const int j : subset)
        total += (positions[j] - observed[j]).squaredNorm();
    return total / static_cast<double>(subset.size());
}

FitResult fit_landmarks(const model::MorphableBasis& basis, const std::vector<model::Vec2>& observed,
                        const FitConfig& config, FitObjective /*objective*/,
                        const std::optional<model::ModelParams>& initial)
{
    config.validate();
    check_observed(basis, observed);

    model::ModelParams p = initial.value_or(model::ModelParams::neutral(basis));
    check_params(basis, p, "fit_landmarks(initial)");
    if (!(p.scale > 0.0))
        throw InvalidArgumentError("initial scale must be > 0");

    const LandmarkProblem problem(basis, observed, all_slots(observed.size()),
                                  config.id_regularization, config.exp_regularization);
    const int num_id = basis.num_id_coeffs();
    const int num_exp = basis.num_exp_coeffs();

    FitResult out;
    double cost = problem.cost(p);
    out.cost_trace.push_back(cost);
    double lambda = config.damping_init;

    while (out.iterations < config.max_iterations)
    {
        const Linearization lin(problem, p);
        if (lin.gradient_flat(cost))
        {
            out.converged = true;
            break;
        }

        const double prev = cost;
        if (!lm_step(problem, lin, p, cost, lambda, lin.marquardt_diag(), num_id, num_exp))
        {
            // no damping value yields a representable decrease: the iterate
            // sits at the achievable optimum, i.e. relative decrease 0 < tol
            out.converged = true;
            break;
        }
        ++out.iterations;
        out.cost_trace.push_back(cost);

        const double rel = (prev - cost) / std::max(prev, 1e-300);
        if (rel < config.convergence_tol || cost == 0.0)
        {
            out.converged = true;
            break;
        }
    }
    if (!out.converged && out.diagnostic.empty() && out.iterations >= config.max_iterations)
        out.diagnostic = "iteration budget exhausted before convergence";

    out.params = p;
    out.final_cost = cost;
    return out;
}

std::pair<std::vector<int>, std::vector<int>> meta_split(int count, double test_fraction,
                                                         std::uint64_t seed)
{
    const int n_test = static_cast<int>(std::llround(count * test_fraction));
    if (n_test < 2)
        throw ConfigError("meta-test subset would have " + std::to_string(n_test) +
                          " landmarks; need at least 2 (raise meta_test_fraction or add landmarks)");
    if (count - n_test < 2)
        throw ConfigError("meta-train subset would have fewer than 2 landmarks");

    // seeded Fisher-Yates with an explicit rejection-sampled bounded draw,
    // so the split does not depend on library distribution internals
    std::mt19937_64 rng(seed);
    auto bounded = [&rng](std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (true)
        {
            const std::uint64_t r = rng();
            if (r >= threshold)
                return r % bound;
        }
    };
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < count - 1; ++i)
    {
        const int j = i + static_cast<int>(bounded(static_cast<std::uint64_t>(count - i)));
        std::swap(order[i], order[j]);
    }
    std::vector<int> test(order.begin(), order.begin() + n_test);
    std::vector<int> train(order.begin() + n_test, order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return {train, test};
}

BranchOutcome run_branch_steps(const model::MorphableBasis& basis,
                               const std::vector<model::Vec2>& observed,
                               const std::vector<int>& train_subset, const model::ModelParams& start,
                               const model::ModelParams& anchor, Branch branch, double damping_in,
                               const FitConfig& config)
{
    const LandmarkProblem problem(basis, observed, train_subset, config.id_regularization,
                                  config.exp_regularization);
    const int num_id = basis.num_id_coeffs();
    const int num_exp = basis.num_exp_coeffs();

    BranchOutcome out;
    out.params = start;
    out.damping = damping_in;

    // the VDC trust metric is evaluated once, at the anchor
    Eigen::VectorXd vdc_diag;
    if (branch == Branch::Vdc)
        vdc_diag = vertex_sensitivity_diag(basis, anchor);

    double cost = problem.cost(out.params);
    for (int s = 0; s < config.meta_k; ++s)
    {
        Eigen::VectorXd diag;
        if (branch == Branch::Vdc)
            diag = vdc_diag;
        else
            diag = wpdc_weights(basis, out.params, anchor).cwiseMax(kDampingFloor);

        const Linearization lin(problem, out.params);
        if (!lm_step(problem, lin, out.params, cost, out.damping, diag, num_id, num_exp))
            break;
        ++out.accepted;
        out.cost_trace.push_back(cost);
    }
    return out;
}

FitResult meta_joint_fit(const model::MorphableBasis& basis, const std::vector<model::Vec2>& observed,
                         const model::ModelParams& params_gt_proxy, const FitConfig& config)
{
    config.validate();
    check_observed(basis, observed);
    check_params(basis, params_gt_proxy, "meta_joint_fit(params_gt_proxy)");
    if (!(params_gt_proxy.scale > 0.0))
        throw InvalidArgumentError("params_gt_proxy scale must be > 0");

    const auto [train, test] = meta_split(static_cast<int>(observed.size()),
                                          config.meta_test_fraction, config.rng_seed);
    const LandmarkProblem train_problem(basis, observed, train, config.id_regularization,
                                        config.exp_regularization);

    FitResult out;
    model::ModelParams incumbent = params_gt_proxy;
    double lambda = config.damping_init;
    double train_cost = train_problem.cost(incumbent);
    out.cost_trace.push_back(train_cost);

    const int meta_iterations = std::max(1, config.max_iterations / config.meta_k);
    for (int m = 0; m < meta_iterations; ++m)
    {
        const model::ModelParams anchor = incumbent;
        const BranchOutcome vdc_cand = run_branch_steps(basis, observed, train, incumbent, anchor,
                                                        Branch::Vdc, lambda, config);
        const BranchOutcome wpdc_cand = run_branch_steps(basis, observed, train, incumbent, anchor,
                                                         Branch::Wpdc, lambda, config);

        BranchRecord record;
        record.vdc_meta_error = subset_reprojection_error(basis, vdc_cand.params, observed, test);
        record.wpdc_meta_error = subset_reprojection_error(basis, wpdc_cand.params, observed, test);
        record.chosen = record.vdc_meta_error < record.wpdc_meta_error ? Branch::Vdc : Branch::Wpdc;
        out.branch_trace.push_back(record);

        const BranchOutcome& kept = record.chosen == Branch::Vdc ? vdc_cand : wpdc_cand;
        incumbent = kept.params;
        lambda = kept.damping;
        out.iterations += kept.accepted;
        out.cost_trace.insert(out.cost_trace.end(), kept.cost_trace.begin(), kept.cost_trace.end());

        if (kept.accepted == 0)
        {
            // neither branch found a representable decrease: both sit at the
            // achievable optimum of the train objective
            out.converged = true;
            break;
        }

        const double new_cost = kept.cost_trace.back();
        const double rel = (train_cost - new_cost) / std::max(train_cost, 1e-300);
        train_cost = new_cost;
        if (rel < config.convergence_tol)
        {
            out.converged = true;
            break;
        }
    }
    if (!out.converged && out.diagnostic.empty())
        out.diagnostic = "meta-iteration budget exhausted before convergence";

    out.params = incumbent;
    const LandmarkProblem full_problem(basis, observed, all_slots(observed.size()),
                                       config.id_regularization, config.exp_regularization);
    out.final_cost = full_problem.cost(incumbent);
    return out;
}

} // namespace fitting
} // namespace facekit
