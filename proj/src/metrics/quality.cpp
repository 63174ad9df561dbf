/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/metrics/quality.cpp
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
#include "facekit/metrics/quality.hpp"

#include "facekit/core/error.hpp"
#include "facekit/kernels/kernels.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace facekit {
namespace metrics {

namespace {

std::vector<double> gaussian_kernel(int window, double sigma)
{
    std::vector<double> k(window);
    const double c = (window - 1) / 2.0;
    double total = 0.0;
    for (int i = 0; i < window; ++i)
    {
        k[i] = std::exp(-((i - c) * (i - c)) / (2.0 * sigma * sigma));
        total += k[i];
    }
    for (auto& v : k)
        v /= total;
    return k;
}

// Separable "valid" blur: output is (w - 2r) x (h - 2r).
std::vector<double> blur_valid(const std::vector<double>& src, int w, int h,
                               const std::vector<double>& kernel)
{
    const auto& k = kernels::active();
    const int r = static_cast<int>(kernel.size() / 2);
    const int out_w = w - 2 * r;
    const int out_h = h - 2 * r;

    std::vector<double> tmp(static_cast<std::size_t>(out_w) * h);
    for (int y = 0; y < h; ++y)
        k.conv_row_valid(src.data() + static_cast<std::size_t>(y) * w, w, kernel.data(), r,
                         tmp.data() + static_cast<std::size_t>(y) * out_w);

    std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
    k.conv_col_valid(tmp.data(), out_w, h, kernel.data(), r, out.data());
    return out;
}

void check_pair(const ImageBuffer& a, const ImageBuffer& b)
{
    if (a.width != b.width || a.height != b.height)
        throw InvalidArgumentError("image pair dimensions differ (" + std::to_string(a.width) + "x" +
                                   std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                                   std::to_string(b.height) + ")");
    if (a.empty())
        throw InvalidArgumentError("images are empty");
}

struct LocalStats
{
    int w = 0, h = 0; // valid-region dimensions
    std::vector<double> mu1, mu2, s11, s22, s12;
};

LocalStats local_stats(const std::vector<double>& x, const std::vector<double>& y, int w, int h,
                       const std::vector<double>& kernel)
{
    const auto& k = kernels::active();
    const std::size_t n = x.size();
    std::vector<double> xx(n), yy(n), xy(n);
    k.mul(n, x.data(), x.data(), xx.data());
    k.mul(n, y.data(), y.data(), yy.data());
    k.mul(n, x.data(), y.data(), xy.data());

    LocalStats st;
    const int r = static_cast<int>(kernel.size() / 2);
    st.w = w - 2 * r;
    st.h = h - 2 * r;
    st.mu1 = blur_valid(x, w, h, kernel);
    st.mu2 = blur_valid(y, w, h, kernel);
    st.s11 = blur_valid(xx, w, h, kernel);
    st.s22 = blur_valid(yy, w, h, kernel);
    st.s12 = blur_valid(xy, w, h, kernel);
    const std::size_t m = st.mu1.size();
    for (std::size_t i = 0; i < m; ++i)
    {
        st.s11[i] -= st.mu1[i] * st.mu1[i];
        st.s22[i] -= st.mu2[i] * st.mu2[i];
        st.s12[i] -= st.mu1[i] * st.mu2[i];
    }
    return st;
}

std::vector<double> downsample2(const std::vector<double>& src, int w, int h, int& out_w, int& out_h)
{
    out_w = w / 2;
    out_h = h / 2;
    std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
    for (int y = 0; y < out_h; ++y)
        for (int x = 0; x < out_w; ++x)
        {
            const std::size_t i = static_cast<std::size_t>(2 * y) * w + 2 * x;
            out[static_cast<std::size_t>(y) * out_w + x] =
                0.25 * (src[i] + src[i + 1] + src[i + w] + src[i + w + 1]);
        }
    return out;
}

// Scharr gradient magnitude (kernels /16), zero-padded 'same'.
std::vector<double> scharr_magnitude(const std::vector<double>& src, int w, int h)
{
    static const double gx[3][3] = {{-3, 0, 3}, {-10, 0, 10}, {-3, 0, 3}};
    std::vector<double> out(static_cast<std::size_t>(w) * h);
    auto at = [&](int x, int y) -> double {
        if (x < 0 || x >= w || y < 0 || y >= h)
            return 0.0;
        return src[static_cast<std::size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
        {
            double sx = 0.0, sy = 0.0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                {
                    const double v = at(x + dx, y + dy);
                    sx += gx[dy + 1][dx + 1] * v;
                    sy += gx[dx + 1][dy + 1] * v;
                }
            out[static_cast<std::size_t>(y) * w + x] = std::hypot(sx / 16.0, sy / 16.0);
        }
    return out;
}

constexpr double kMsSsimWeights[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

} // namespace

SsimResult ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params)
{
    check_pair(a, b);
    if (a.width < params.window || a.height < params.window)
        throw InvalidArgumentError("images smaller than the SSIM window (" +
                                   std::to_string(params.window) + ")");

    const ImageBuffer la = a.to_luma();
    const ImageBuffer lb = b.to_luma();
    const auto kernel = gaussian_kernel(params.window, params.sigma);
    const LocalStats st = local_stats(la.data, lb.data, a.width, a.height, kernel);

    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

    SsimResult res;
    res.map = ImageBuffer(st.w, st.h, 1);
    const std::size_t m = res.map.data.size();
    for (std::size_t i = 0; i < m; ++i)
    {
        const double num = (2.0 * st.mu1[i] * st.mu2[i] + c1) * (2.0 * st.s12[i] + c2);
        const double den =
            (st.mu1[i] * st.mu1[i] + st.mu2[i] * st.mu2[i] + c1) * (st.s11[i] + st.s22[i] + c2);
        res.map.data[i] = num / den;
    }
    res.mean = kernels::active().sum(m, res.map.data.data()) / static_cast<double>(m);
    return res;
}

MsSsimResult ms_ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params)
{
    check_pair(a, b);

    // number of dyadic scales that still fit the window, at most 5
    int scales = 0;
    {
        int w = a.width, h = a.height;
        while (scales < 5 && std::min(w, h) >= params.window)
        {
            ++scales;
            w /= 2;
            h /= 2;
        }
    }
    if (scales == 0)
        throw InvalidArgumentError("images smaller than the SSIM window (" +
                                   std::to_string(params.window) + ")");

    MsSsimResult res;
    res.scales_used = scales;
    res.weights.assign(kMsSsimWeights, kMsSsimWeights + scales);
    const double wsum = std::accumulate(res.weights.begin(), res.weights.end(), 0.0);
    for (auto& w : res.weights)
        w /= wsum;

    const auto kernel = gaussian_kernel(params.window, params.sigma);
    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);

    std::vector<double> x = a.to_luma().data;
    std::vector<double> y = b.to_luma().data;
    int w = a.width, h = a.height;

    double value = 1.0;
    for (int level = 0; level < scales; ++level)
    {
        const LocalStats st = local_stats(x, y, w, h, kernel);
        const std::size_t m = st.mu1.size();

        double cs_sum = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            cs_sum += (2.0 * st.s12[i] + c2) / (st.s11[i] + st.s22[i] + c2);
        const double cs = std::max(cs_sum / static_cast<double>(m), 0.0);

        if (level == scales - 1)
        {
            double l_sum = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                l_sum += (2.0 * st.mu1[i] * st.mu2[i] + c1) /
                         (st.mu1[i] * st.mu1[i] + st.mu2[i] * st.mu2[i] + c1);
            const double lum = std::max(l_sum / static_cast<double>(m), 0.0);
            value *= std::pow(lum, res.weights[level]);
        }
        value *= std::pow(cs, res.weights[level]);

        if (level + 1 < scales)
        {
            int nw = 0, nh = 0;
            x = downsample2(x, w, h, nw, nh);
            y = downsample2(y, w, h, nw, nh);
            w = nw;
            h = nh;
        }
    }
    res.value = value;
    return res;
}

double fsim(const ImageBuffer& a, const ImageBuffer& b, const FsimParams& params)
{
    check_pair(a, b);

    const ImageBuffer la = a.to_luma();
    const ImageBuffer lb = b.to_luma();
    const LogGaborBank bank = make_log_gabor_bank(a.width, a.height, params.pc);
    const std::vector<double> pc1 = phase_congruency(la, bank);
    const std::vector<double> pc2 = phase_congruency(lb, bank);
    const std::vector<double> g1 = scharr_magnitude(la.data, a.width, a.height);
    const std::vector<double> g2 = scharr_magnitude(lb.data, a.width, a.height);

    double num = 0.0, den = 0.0;
    const std::size_t n = pc1.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        const double s_pc = (2.0 * pc1[i] * pc2[i] + params.t1) /
                            (pc1[i] * pc1[i] + pc2[i] * pc2[i] + params.t1);
        const double s_g =
            (2.0 * g1[i] * g2[i] + params.t2) / (g1[i] * g1[i] + g2[i] * g2[i] + params.t2);
        const double pcm = std::max(pc1[i], pc2[i]);
        num += s_pc * s_g * pcm;
        den += pcm;
    }
    if (den == 0.0)
        return 1.0; // both images featureless; identical as far as FSIM sees
    return num / den;
}

MetricReport evaluate_pair(const ImageBuffer& a, const ImageBuffer& b)
{
    MetricReport report;
    report.ssim = ssim(a, b, report.ssim_params).mean;
    const MsSsimResult ms = ms_ssim(a, b, report.ssim_params);
    report.ms_ssim = ms.value;
    report.ms_ssim_scales = ms.scales_used;
    report.ms_ssim_weights = ms.weights;
    report.fsim = fsim(a, b, report.fsim_params);
    return report;
}

MeshStats mesh_stats(const model::FaceMesh& mesh, int sample_count, std::uint64_t seed)
{
    if (mesh.triangles.empty())
        throw InvalidArgumentError("mesh_stats requires at least one triangle");
    if (sample_count < 1)
        throw InvalidArgumentError("sample_count must be >= 1");
    const std::size_t n = mesh.vertex_count();
    if (static_cast<std::size_t>(sample_count) > n)
        throw InvalidArgumentError("sample_count " + std::to_string(sample_count) +
                                   " exceeds vertex count " + std::to_string(n));

    // seeded partial Fisher-Yates; the bounded draw is rejection-sampled so
    // the selection is uniform and reproducible
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
    std::vector<std::uint32_t> indices(n);
    std::iota(indices.begin(), indices.end(), 0u);
    std::vector<bool> sampled(n, false);
    for (int i = 0; i < sample_count; ++i)
    {
        const std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
        std::swap(indices[i], indices[j]);
        sampled[indices[i]] = true;
    }

    double area_sum = 0.0;
    std::size_t incident = 0;
    for (const auto& tri : mesh.triangles)
    {
        if (!(sampled[tri[0]] || sampled[tri[1]] || sampled[tri[2]]))
            continue;
        const model::Vec3 p0 = mesh.vertex(tri[0]);
        const model::Vec3 edge1 = mesh.vertex(tri[1]) - p0;
        const model::Vec3 edge2 = mesh.vertex(tri[2]) - p0;
        area_sum += 0.5 * edge1.cross(edge2).norm();
        ++incident;
    }

    MeshStats stats;
    stats.triangle_count = mesh.triangles.size();
    stats.avg_triangle_area = incident ? area_sum / static_cast<double>(incident) : 0.0;
    stats.sample_seed = seed;
    stats.sampled_vertex_count = sample_count;
    return stats;
}

} // namespace metrics
} // namespace facekit
