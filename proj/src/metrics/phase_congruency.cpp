/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: src/metrics/phase_congruency.cpp
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
#include "facekit/metrics/phase_congruency.hpp"

#include "facekit/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace facekit {
namespace metrics {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

double median(std::vector<double> v)
{
    const std::size_t n = v.size();
    auto mid = v.begin() + n / 2;
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1)
        return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

} // namespace

struct Dft2d::Impl
{
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    std::size_t n = 0;
};

Dft2d::Dft2d(int width, int height) : impl_(std::make_unique<Impl>()), width_(width), height_(height)
{
    if (width <= 0 || height <= 0)
        throw InvalidArgumentError("Dft2d requires positive dimensions");
    impl_->n = static_cast<std::size_t>(width) * height;
    impl_->in = fftw_alloc_complex(impl_->n);
    impl_->out = fftw_alloc_complex(impl_->n);

    // FFTW planning is not thread-safe; execution on per-instance buffers is.
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->fwd = fftw_plan_dft_2d(height, width, impl_->in, impl_->out, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_2d(height, width, impl_->in, impl_->out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Dft2d::~Dft2d()
{
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (impl_->fwd)
        fftw_destroy_plan(impl_->fwd);
    if (impl_->bwd)
        fftw_destroy_plan(impl_->bwd);
    fftw_free(impl_->in);
    fftw_free(impl_->out);
}

void Dft2d::forward(const std::vector<double>& input, std::vector<double>& re,
                    std::vector<double>& im) const
{
    if (input.size() != impl_->n)
        throw InvalidArgumentError("Dft2d::forward input size mismatch");
    for (std::size_t i = 0; i < impl_->n; ++i)
    {
        impl_->in[i][0] = input[i];
        impl_->in[i][1] = 0.0;
    }
    fftw_execute(impl_->fwd);
    re.resize(impl_->n);
    im.resize(impl_->n);
    for (std::size_t i = 0; i < impl_->n; ++i)
    {
        re[i] = impl_->out[i][0];
        im[i] = impl_->out[i][1];
    }
}

void Dft2d::inverse(const std::vector<double>& re, const std::vector<double>& im,
                    std::vector<double>& out_re, std::vector<double>& out_im) const
{
    if (re.size() != impl_->n || im.size() != impl_->n)
        throw InvalidArgumentError("Dft2d::inverse input size mismatch");
    for (std::size_t i = 0; i < impl_->n; ++i)
    {
        impl_->in[i][0] = re[i];
        impl_->in[i][1] = im[i];
    }
    fftw_execute(impl_->bwd);
    const double norm = 1.0 / static_cast<double>(impl_->n);
    out_re.resize(impl_->n);
    out_im.resize(impl_->n);
    for (std::size_t i = 0; i < impl_->n; ++i)
    {
        out_re[i] = impl_->out[i][0] * norm;
        out_im[i] = impl_->out[i][1] * norm;
    }
}

LogGaborBank make_log_gabor_bank(int width, int height, const PhaseCongruencyParams& params)
{
    if (width <= 0 || height <= 0)
        throw InvalidArgumentError("filter bank requires positive dimensions");

    LogGaborBank bank;
    bank.width = width;
    bank.height = height;
    bank.params = params;
    bank.filters.resize(static_cast<std::size_t>(params.scales) * params.orientations);

    const std::size_t n = static_cast<std::size_t>(width) * height;
    std::vector<double> radius(n), theta_sin(n), theta_cos(n), lowpass(n);
    for (int y = 0; y < height; ++y)
    {
        const double fy = (y <= height / 2 ? y : y - height) / static_cast<double>(height);
        for (int x = 0; x < width; ++x)
        {
            const double fx = (x <= width / 2 ? x : x - width) / static_cast<double>(width);
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            const double r = std::hypot(fx, fy);
            radius[i] = (i == 0) ? 1.0 : r; // avoid log(0) at DC; DC is zeroed below
            const double angle = std::atan2(-fy, fx);
            theta_sin[i] = std::sin(angle);
            theta_cos[i] = std::cos(angle);
            lowpass[i] = 1.0 / (1.0 + std::pow(r / 0.45, 30.0));
        }
    }

    const double theta_sigma = std::numbers::pi / params.orientations / params.dtheta_on_sigma;
    const double log_sigma_onf = std::log(params.sigma_onf);

    for (int s = 0; s < params.scales; ++s)
    {
        const double wavelength = params.min_wavelength * std::pow(params.mult, s);
        const double f0 = 1.0 / wavelength;
        std::vector<double> radial(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const double lr = std::log(radius[i] / f0);
            radial[i] = std::exp(-(lr * lr) / (2.0 * log_sigma_onf * log_sigma_onf)) * lowpass[i];
        }
        radial[0] = 0.0;

        for (int o = 0; o < params.orientations; ++o)
        {
            const double angl = o * std::numbers::pi / params.orientations;
            const double ca = std::cos(angl), sa = std::sin(angl);
            auto& filt = bank.filters[static_cast<std::size_t>(s) * params.orientations + o];
            filt.resize(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                const double ds = theta_sin[i] * ca - theta_cos[i] * sa;
                const double dc = theta_cos[i] * ca + theta_sin[i] * sa;
                const double dtheta = std::abs(std::atan2(ds, dc));
                filt[i] = radial[i] * std::exp(-(dtheta * dtheta) / (2.0 * theta_sigma * theta_sigma));
            }
        }
    }
    return bank;
}

BankResponses filter_responses(const ImageBuffer& luma, const LogGaborBank& bank)
{
    if (luma.channels != 1)
        throw InvalidArgumentError("filter_responses expects a single-channel image");
    if (luma.width != bank.width || luma.height != bank.height)
        throw InvalidArgumentError("image dimensions do not match the filter bank");

    const Dft2d dft(bank.width, bank.height);
    std::vector<double> spec_re, spec_im;
    dft.forward(luma.data, spec_re, spec_im);

    const std::size_t n = spec_re.size();
    BankResponses out;
    out.re.resize(bank.filters.size());
    out.im.resize(bank.filters.size());

    std::vector<double> fre(n), fim(n);
    for (std::size_t f = 0; f < bank.filters.size(); ++f)
    {
        const auto& filt = bank.filters[f];
        for (std::size_t i = 0; i < n; ++i)
        {
            fre[i] = spec_re[i] * filt[i];
            fim[i] = spec_im[i] * filt[i];
        }
        dft.inverse(fre, fim, out.re[f], out.im[f]);
    }
    return out;
}

std::vector<double> phase_congruency(const ImageBuffer& luma, const LogGaborBank& bank)
{
    return phase_congruency(filter_responses(luma, bank), bank);
}

std::vector<double> phase_congruency(const BankResponses& responses, const LogGaborBank& bank)
{
    const auto& p = bank.params;
    const std::size_t n = static_cast<std::size_t>(bank.width) * bank.height;

    std::vector<double> energy_all(n, 0.0), an_all(n, 0.0);
    std::vector<double> sum_e(n), sum_o(n), sum_an(n), max_an(n), energy(n);

    for (int o = 0; o < p.orientations; ++o)
    {
        std::fill(sum_e.begin(), sum_e.end(), 0.0);
        std::fill(sum_o.begin(), sum_o.end(), 0.0);
        std::fill(sum_an.begin(), sum_an.end(), 0.0);

        double tau = 0.0;
        for (int s = 0; s < p.scales; ++s)
        {
            const auto& re = responses.re[static_cast<std::size_t>(s) * p.orientations + o];
            const auto& im = responses.im[static_cast<std::size_t>(s) * p.orientations + o];
            std::vector<double> an(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                an[i] = std::hypot(re[i], im[i]);
                sum_an[i] += an[i];
                sum_e[i] += re[i];
                sum_o[i] += im[i];
            }
            if (s == 0)
            {
                // noise energy estimated from the smallest-scale amplitudes
                tau = median(an) / std::sqrt(std::log(4.0));
                max_an = an;
            }
            else
            {
                for (std::size_t i = 0; i < n; ++i)
                    max_an[i] = std::max(max_an[i], an[i]);
            }
        }

        // local energy along the mean phase direction
        for (std::size_t i = 0; i < n; ++i)
        {
            const double x_energy = std::hypot(sum_e[i], sum_o[i]) + p.epsilon;
            const double mean_e = sum_e[i] / x_energy;
            const double mean_o = sum_o[i] / x_energy;
            energy[i] = 0.0;
            for (int s = 0; s < p.scales; ++s)
            {
                const auto& re = responses.re[static_cast<std::size_t>(s) * p.orientations + o];
                const auto& im = responses.im[static_cast<std::size_t>(s) * p.orientations + o];
                energy[i] += re[i] * mean_e + im[i] * mean_o -
                             std::abs(re[i] * mean_o - im[i] * mean_e);
            }
        }

        const double total_tau = tau * (1.0 - std::pow(1.0 / p.mult, p.scales)) / (1.0 - 1.0 / p.mult);
        const double noise_mean = total_tau * std::sqrt(std::numbers::pi / 2.0);
        const double noise_sigma = total_tau * std::sqrt((4.0 - std::numbers::pi) / 2.0);
        const double threshold = noise_mean + p.noise_k * noise_sigma;

        for (std::size_t i = 0; i < n; ++i)
        {
            const double spread = (sum_an[i] / (max_an[i] + p.epsilon) - 1.0) / (p.scales - 1);
            const double weight = 1.0 / (1.0 + std::exp(p.gain * (p.cutoff - spread)));
            energy_all[i] += weight * std::max(energy[i] - threshold, 0.0);
            an_all[i] += sum_an[i];
        }
    }

    std::vector<double> pc(n);
    for (std::size_t i = 0; i < n; ++i)
        pc[i] = energy_all[i] / (an_all[i] + p.epsilon);
    return pc;
}

} // namespace metrics
} // namespace facekit
