/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: tests/testsupport/metric_oracles.cpp
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
#include "metric_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace facekit {
namespace testsupport {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> window_weights()
{
    std::vector<double> w(kWindow * kWindow);
    double total = 0.0;
    for (int y = 0; y < kWindow; ++y)
        for (int x = 0; x < kWindow; ++x)
        {
            const double dx = x - (kWindow - 1) / 2.0;
            const double dy = y - (kWindow - 1) / 2.0;
            w[y * kWindow + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
            total += w[y * kWindow + x];
        }
    for (auto& v : w)
        v /= total;
    return w;
}

std::vector<double> to_luma_vec(const ImageBuffer& img)
{
    return img.to_luma().data;
}

struct WindowMoments
{
    double mu1, mu2, var1, var2, cov;
};

WindowMoments window_moments(const std::vector<double>& a, const std::vector<double>& b, int w,
                             int x0, int y0, const std::vector<double>& weights)
{
    WindowMoments m{0, 0, 0, 0, 0};
    for (int dy = 0; dy < kWindow; ++dy)
        for (int dx = 0; dx < kWindow; ++dx)
        {
            const double wt = weights[dy * kWindow + dx];
            m.mu1 += wt * a[(y0 + dy) * w + (x0 + dx)];
            m.mu2 += wt * b[(y0 + dy) * w + (x0 + dx)];
        }
    for (int dy = 0; dy < kWindow; ++dy)
        for (int dx = 0; dx < kWindow; ++dx)
        {
            const double wt = weights[dy * kWindow + dx];
            const double da = a[(y0 + dy) * w + (x0 + dx)] - m.mu1;
            const double db = b[(y0 + dy) * w + (x0 + dx)] - m.mu2;
            m.var1 += wt * da * da;
            m.var2 += wt * db * db;
            m.cov += wt * da * db;
        }
    return m;
}

void cs_and_luminance_means(const std::vector<double>& a, const std::vector<double>& b, int w, int h,
                            double& cs_mean, double& l_mean)
{
    static const std::vector<double> weights = window_weights();
    double cs_sum = 0.0, l_sum = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + kWindow <= h; ++y0)
        for (int x0 = 0; x0 + kWindow <= w; ++x0)
        {
            const WindowMoments m = window_moments(a, b, w, x0, y0, weights);
            cs_sum += (2.0 * m.cov + kC2) / (m.var1 + m.var2 + kC2);
            l_sum += (2.0 * m.mu1 * m.mu2 + kC1) / (m.mu1 * m.mu1 + m.mu2 * m.mu2 + kC1);
            ++count;
        }
    cs_mean = cs_sum / count;
    l_mean = l_sum / count;
}

std::vector<double> half(const std::vector<double>& src, int w, int h, int& ow, int& oh)
{
    ow = w / 2;
    oh = h / 2;
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x)
            out[y * ow + x] = (src[(2 * y) * w + 2 * x] + src[(2 * y) * w + 2 * x + 1] +
                               src[(2 * y + 1) * w + 2 * x] + src[(2 * y + 1) * w + 2 * x + 1]) /
                              4.0;
    return out;
}

} // namespace

double ssim_oracle(const ImageBuffer& a, const ImageBuffer& b)
{
    static const std::vector<double> weights = window_weights();
    const auto la = to_luma_vec(a);
    const auto lb = to_luma_vec(b);

    double total = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + kWindow <= a.height; ++y0)
        for (int x0 = 0; x0 + kWindow <= a.width; ++x0)
        {
            const WindowMoments m = window_moments(la, lb, a.width, x0, y0, weights);
            const double num = (2.0 * m.mu1 * m.mu2 + kC1) * (2.0 * m.cov + kC2);
            const double den =
                (m.mu1 * m.mu1 + m.mu2 * m.mu2 + kC1) * (m.var1 + m.var2 + kC2);
            total += num / den;
            ++count;
        }
    return total / count;
}

double ms_ssim_oracle(const ImageBuffer& a, const ImageBuffer& b)
{
    static const double canonical[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

    int scales = 0;
    {
        int w = a.width, h = a.height;
        while (scales < 5 && std::min(w, h) >= kWindow)
        {
            ++scales;
            w /= 2;
            h /= 2;
        }
    }
    double wsum = 0.0;
    for (int s = 0; s < scales; ++s)
        wsum += canonical[s];

    std::vector<double> x = to_luma_vec(a), y = to_luma_vec(b);
    int w = a.width, h = a.height;
    double value = 1.0;
    for (int s = 0; s < scales; ++s)
    {
        double cs, lum;
        cs_and_luminance_means(x, y, w, h, cs, lum);
        value *= std::pow(std::max(cs, 0.0), canonical[s] / wsum);
        if (s == scales - 1)
            value *= std::pow(std::max(lum, 0.0), canonical[s] / wsum);
        else
        {
            int ow, oh;
            x = half(x, w, h, ow, oh);
            y = half(y, w, h, ow, oh);
            w = ow;
            h = oh;
        }
    }
    return value;
}

namespace {

// Independent per-pixel phase congruency from shared bank responses.
std::vector<double> pc_reference(const metrics::BankResponses& resp, const metrics::LogGaborBank& bank)
{
    const auto& p = bank.params;
    const std::size_t n = static_cast<std::size_t>(bank.width) * bank.height;
    std::vector<double> energy_total(n, 0.0), amplitude_total(n, 0.0);

    for (int o = 0; o < p.orientations; ++o)
    {
        // noise threshold from a full sort of the finest-scale amplitudes
        std::vector<double> finest(n);
        for (std::size_t i = 0; i < n; ++i)
            finest[i] = std::sqrt(resp.re[o][i] * resp.re[o][i] + resp.im[o][i] * resp.im[o][i]);
        std::vector<double> sorted = finest;
        std::sort(sorted.begin(), sorted.end());
        const double med = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        const double tau = med / std::sqrt(std::log(4.0));
        double geo = 0.0;
        for (int s = 0; s < p.scales; ++s)
            geo += std::pow(1.0 / p.mult, s);
        const double total_tau = tau * geo;
        const double threshold = total_tau * (std::sqrt(std::numbers::pi / 2.0) +
                                              p.noise_k * std::sqrt((4.0 - std::numbers::pi) / 2.0));

        for (std::size_t i = 0; i < n; ++i)
        {
            double fe = 0.0, fo = 0.0, amp_sum = 0.0, amp_max = 0.0;
            for (int s = 0; s < p.scales; ++s)
            {
                const double e = resp.re[s * p.orientations + o][i];
                const double od = resp.im[s * p.orientations + o][i];
                fe += e;
                fo += od;
                const double amp = std::sqrt(e * e + od * od);
                amp_sum += amp;
                amp_max = std::max(amp_max, amp);
            }
            const double xe = std::sqrt(fe * fe + fo * fo) + p.epsilon;
            double energy = 0.0;
            for (int s = 0; s < p.scales; ++s)
            {
                const double e = resp.re[s * p.orientations + o][i];
                const double od = resp.im[s * p.orientations + o][i];
                energy += (e * fe + od * fo) / xe - std::abs(e * fo - od * fe) / xe;
            }
            const double spread = (amp_sum / (amp_max + p.epsilon) - 1.0) / (p.scales - 1);
            const double weight = 1.0 / (1.0 + std::exp(p.gain * (p.cutoff - spread)));
            energy_total[i] += weight * std::max(energy - threshold, 0.0);
            amplitude_total[i] += amp_sum;
        }
    }
    std::vector<double> pc(n);
    for (std::size_t i = 0; i < n; ++i)
        pc[i] = energy_total[i] / (amplitude_total[i] + p.epsilon);
    return pc;
}

} // namespace

double fsim_oracle(const ImageBuffer& a, const ImageBuffer& b)
{
    const ImageBuffer la = a.to_luma();
    const ImageBuffer lb = b.to_luma();
    const auto bank = metrics::make_log_gabor_bank(a.width, a.height); // shared on purpose
    const auto pc1 = pc_reference(metrics::filter_responses(la, bank), bank);
    const auto pc2 = pc_reference(metrics::filter_responses(lb, bank), bank);

    // Scharr magnitude, written longhand
    auto grad = [&](const ImageBuffer& img) {
        std::vector<double> g(static_cast<std::size_t>(img.width) * img.height);
        auto px = [&](int x, int y) {
            if (x < 0 || x >= img.width || y < 0 || y >= img.height)
                return 0.0;
            return img.at(x, y);
        };
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
            {
                const double sx = (3.0 * px(x + 1, y - 1) + 10.0 * px(x + 1, y) +
                                   3.0 * px(x + 1, y + 1) - 3.0 * px(x - 1, y - 1) -
                                   10.0 * px(x - 1, y) - 3.0 * px(x - 1, y + 1)) /
                                  16.0;
                const double sy = (3.0 * px(x - 1, y + 1) + 10.0 * px(x, y + 1) +
                                   3.0 * px(x + 1, y + 1) - 3.0 * px(x - 1, y - 1) -
                                   10.0 * px(x, y - 1) - 3.0 * px(x + 1, y - 1)) /
                                  16.0;
                g[y * img.width + x] = std::sqrt(sx * sx + sy * sy);
            }
        return g;
    };
    const auto g1 = grad(la);
    const auto g2 = grad(lb);

    const double t1 = 0.85, t2 = 160.0 / (255.0 * 255.0);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pc1.size(); ++i)
    {
        const double s_pc = (2.0 * pc1[i] * pc2[i] + t1) / (pc1[i] * pc1[i] + pc2[i] * pc2[i] + t1);
        const double s_g = (2.0 * g1[i] * g2[i] + t2) / (g1[i] * g1[i] + g2[i] * g2[i] + t2);
        const double pcm = std::max(pc1[i], pc2[i]);
        num += s_pc * s_g * pcm;
        den += pcm;
    }
    return den == 0.0 ? 1.0 : num / den;
}

} // namespace testsupport
} // namespace facekit
