/*
 * facekit - 3D morphable face model fitting and texture toolkit.
 *
 * File: tools/facekit_main.cpp
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
 *
 * Batch front end: synth | fit | align | texture | metrics | stats.
 * Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numerical
 * failure (non-convergence under --strict).
 */
#include "facekit/align/alignment.hpp"
#include "facekit/core/error.hpp"
#include "facekit/core/format.hpp"
#include "facekit/core/model.hpp"
#include "facekit/fit/fitting.hpp"
#include "facekit/io/asset_io.hpp"
#include "facekit/metrics/quality.hpp"
#include "facekit/tex/texture.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

namespace {

using namespace facekit;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

/// A usage-level problem (bad flag value) as opposed to bad data files.
class UsageError : public Error
{
public:
    using Error::Error;
};

/**
 * Collects output files as temp siblings and renames them into place only
 * when every computation and write succeeded, so failed runs leave nothing
 * behind.
 */
class OutputStager
{
public:
    ~OutputStager()
    {
        std::error_code ec;
        for (const auto& dir : dirs_)
            std::filesystem::remove_all(dir, ec);
    }

    /// Temp sibling inside a per-directory staging folder; the file keeps
    /// its real basename so content that references sibling filenames
    /// (OBJ -> MTL -> PNG) stays correct after the final rename.
    std::filesystem::path stage(const std::filesystem::path& final_path)
    {
        const auto parent = final_path.has_parent_path() ? final_path.parent_path()
                                                         : std::filesystem::path(".");
        const auto staging = parent / (".staging" + std::to_string(::getpid()));
        if (std::find(dirs_.begin(), dirs_.end(), staging) == dirs_.end())
        {
            std::filesystem::create_directories(staging);
            dirs_.push_back(staging);
        }
        const auto tmp = staging / final_path.filename();
        staged_.emplace_back(tmp, final_path);
        return tmp;
    }

    void commit()
    {
        for (auto& [tmp, final] : staged_)
            std::filesystem::rename(tmp, final);
        staged_.clear();
        std::error_code ec;
        for (const auto& dir : dirs_)
            std::filesystem::remove_all(dir, ec);
        dirs_.clear();
    }

private:
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
    std::vector<std::filesystem::path> dirs_;
};

json load_config_file(const std::string& path)
{
    if (path.empty())
        return json::object();
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path);
    try
    {
        json cfg = json::parse(in);
        if (!cfg.is_object())
            throw SchemaError(path + ": config must be a JSON object");
        return cfg;
    }
    catch (const json::exception& e)
    {
        throw SchemaError(path + ": invalid JSON: " + std::string(e.what()));
    }
}

// explicit flags always win over config-file values
template <typename T>
void merge_config(const json& cfg, const CLI::Option* opt, const char* key, T& value)
{
    if (opt->count() > 0 || !cfg.contains(key))
        return;
    try
    {
        value = cfg.at(key).get<T>();
    }
    catch (const json::exception&)
    {
        throw SchemaError(std::string("config key '") + key + "' has the wrong type");
    }
}

Eigen::VectorXd parse_csv_doubles(const std::string& text)
{
    Eigen::VectorXd out(0);
    if (text.empty())
        return out;
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        try
        {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size())
                throw std::invalid_argument(item);
        }
        catch (const std::exception&)
        {
            throw UsageError("cannot parse '" + item + "' as a number");
        }
    }
    out.resize(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = values[i];
    return out;
}

json params_to_json(const model::ModelParams& p)
{
    json j;
    j["scale"] = p.scale;
    j["rotation"] = {{"pitch", p.pitch}, {"yaw", p.yaw}, {"roll", p.roll}};
    j["translation"] = {p.translation.x(), p.translation.y()};
    j["id_coeffs"] = std::vector<double>(p.id_coeffs.data(), p.id_coeffs.data() + p.id_coeffs.size());
    j["exp_coeffs"] =
        std::vector<double>(p.exp_coeffs.data(), p.exp_coeffs.data() + p.exp_coeffs.size());
    // the stable flattened order: [scale, pitch, yaw, roll, t_x, t_y, id..., exp...]
    const Eigen::VectorXd flat = p.flatten();
    j["flattened"] = std::vector<double>(flat.data(), flat.data() + flat.size());
    return j;
}

model::ModelParams params_from_json(const json& j, const std::string& path)
{
    try
    {
        model::ModelParams p;
        p.scale = j.at("scale").get<double>();
        p.pitch = j.at("rotation").at("pitch").get<double>();
        p.yaw = j.at("rotation").at("yaw").get<double>();
        p.roll = j.at("rotation").at("roll").get<double>();
        p.translation = {j.at("translation").at(0).get<double>(),
                         j.at("translation").at(1).get<double>()};
        const auto id = j.at("id_coeffs").get<std::vector<double>>();
        const auto exp = j.at("exp_coeffs").get<std::vector<double>>();
        p.id_coeffs = Eigen::Map<const Eigen::VectorXd>(id.data(), static_cast<Eigen::Index>(id.size()));
        p.exp_coeffs =
            Eigen::Map<const Eigen::VectorXd>(exp.data(), static_cast<Eigen::Index>(exp.size()));
        return p;
    }
    catch (const json::exception& e)
    {
        throw SchemaError(path + ": not a parameter file: " + std::string(e.what()));
    }
}

// ---------------------------------------------------------------- synth --

struct SynthArgs
{
    std::string basis, out, format, id_csv, exp_csv, config;
};

int cmd_synth(const SynthArgs& args)
{
    const auto basis = io::load_basis(args.basis);
    Eigen::VectorXd id = parse_csv_doubles(args.id_csv);
    Eigen::VectorXd exp = parse_csv_doubles(args.exp_csv);
    if (id.size() == 0)
        id = Eigen::VectorXd::Zero(basis.num_id_coeffs());
    if (exp.size() == 0)
        exp = Eigen::VectorXd::Zero(basis.num_exp_coeffs());
    if (id.size() != basis.num_id_coeffs())
        throw UsageError("--id-coeffs has " + std::to_string(id.size()) + " values, basis expects " +
                         std::to_string(basis.num_id_coeffs()));
    if (exp.size() != basis.num_exp_coeffs())
        throw UsageError("--exp-coeffs has " + std::to_string(exp.size()) + " values, basis expects " +
                         std::to_string(basis.num_exp_coeffs()));

    std::string format = args.format;
    if (format.empty())
    {
        const auto ext = std::filesystem::path(args.out).extension().string();
        format = ext == ".ply" ? "ply" : "obj";
    }
    if (format != "obj" && format != "ply")
        throw UsageError("--format must be obj or ply");

    const auto mesh = model::synthesize_shape(basis, id, exp);

    OutputStager stager;
    const auto tmp = stager.stage(args.out);
    io::export_mesh(mesh, format == "obj" ? io::MeshFormat::Obj : io::MeshFormat::Ply, tmp,
                    format == "obj" ? basis.uv_coords : std::nullopt);
    stager.commit();

    std::cout << "vertices: " << mesh.vertex_count() << "\ntriangles: " << mesh.triangles.size()
              << "\n";
    return kExitOk;
}

// ------------------------------------------------------------------ fit --

struct FitArgs
{
    std::string basis, landmarks, out_params, config;
    bool meta_joint = false;
    bool strict = false;
    fitting::FitConfig fit;
};

int cmd_fit(const FitArgs& args)
{
    const auto basis = io::load_basis(args.basis);
    const auto set = io::load_landmarks(args.landmarks);
    std::vector<model::Vec2> observed;
    observed.reserve(set.points.size());
    for (const auto& p : set.points)
        observed.push_back({p[0], p[1]});
    if (observed.size() != basis.landmark_indices.size())
        throw InvalidArgumentError("landmark file has " + std::to_string(observed.size()) +
                                   " points but the basis defines " +
                                   std::to_string(basis.landmark_indices.size()) + " landmarks");

    const fitting::FitResult result =
        args.meta_joint
            ? fitting::meta_joint_fit(basis, observed, model::ModelParams::neutral(basis), args.fit)
            : fitting::fit_landmarks(basis, observed, args.fit);

    if (!result.converged)
    {
        std::cerr << "warning: fit did not converge: " << result.diagnostic << "\n";
        if (args.strict)
            return kExitNumerical;
    }

    json out = params_to_json(result.params);
    json diag;
    diag["final_cost"] = result.final_cost;
    diag["iterations"] = result.iterations;
    diag["converged"] = result.converged;
    diag["cost_trace"] = result.cost_trace;
    if (args.meta_joint)
    {
        json trace = json::array();
        for (const auto& rec : result.branch_trace)
            trace.push_back({{"branch", rec.chosen == fitting::Branch::Vdc ? "VDC" : "WPDC"},
                             {"vdc_meta_error", rec.vdc_meta_error},
                             {"wpdc_meta_error", rec.wpdc_meta_error}});
        diag["branch_trace"] = std::move(trace);
        diag["rng_seed"] = args.fit.rng_seed;
    }
    out["diagnostics"] = std::move(diag);

    OutputStager stager;
    {
        std::ofstream f(stager.stage(args.out_params));
        f << out.dump(2) << "\n";
        if (!f)
            throw IoError("write failed for " + args.out_params);
    }
    stager.commit();

    std::cout << "final_cost: " << format_double(result.final_cost)
              << "\niterations: " << result.iterations << "\nconverged: " << std::boolalpha
              << result.converged << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- align --

struct AlignArgs
{
    std::string unaligned, aligned, image, out, config;
    std::vector<double> center;
};

int cmd_align(const AlignArgs& args)
{
    const auto unaligned = io::load_landmarks(args.unaligned);
    const auto aligned = io::load_landmarks(args.aligned);

    std::optional<ImageBuffer> image;
    align::Point2 center{0.0, 0.0};
    if (!args.image.empty())
    {
        image = io::load_image(args.image);
        center = {(image->width - 1) / 2.0, (image->height - 1) / 2.0};
    }
    if (args.center.size() == 2)
        center = {args.center[0], args.center[1]};

    const auto transform = align::compute_pseudo_transform(unaligned, aligned, center);

    json j;
    j["r"] = transform.r_degrees;
    j["tx"] = transform.t_x;
    j["ty"] = transform.t_y;
    std::cout << j.dump() << "\n";

    if (image && !args.out.empty())
    {
        const auto warped = align::apply_rigid_transform(*image, transform, center);
        OutputStager stager;
        io::save_image(warped, stager.stage(args.out));
        stager.commit();
    }
    return kExitOk;
}

// -------------------------------------------------------------- texture --

struct TextureArgs
{
    std::string basis, params, image, out_mesh, out_atlas, config;
    int resolution = 1024;
    int raster_size = 512;
};

int cmd_texture(const TextureArgs& args)
{
    if (args.resolution < 64 || (args.resolution & (args.resolution - 1)) != 0)
        throw UsageError("--resolution must be a power of two >= 64, got " +
                         std::to_string(args.resolution));
    if (args.raster_size < 64)
        throw UsageError("--raster-size must be >= 64");

    const auto basis = io::load_basis(args.basis);
    if (!basis.uv_coords)
        throw InvalidArgumentError(args.basis +
                                   ": basis has no UV coordinates; re-export it with UVs to bake an atlas");
    if (!basis.mirror_map)
        throw InvalidArgumentError(args.basis +
                                   ": basis has no mirror map; occlusion fill needs one");

    json params_doc;
    {
        std::ifstream in(args.params);
        if (!in)
            throw IoError("cannot open " + args.params);
        try
        {
            params_doc = json::parse(in);
        }
        catch (const json::exception& e)
        {
            throw SchemaError(args.params + ": invalid JSON: " + std::string(e.what()));
        }
    }
    const auto params = params_from_json(params_doc, args.params);
    if (params.id_coeffs.size() != basis.num_id_coeffs() ||
        params.exp_coeffs.size() != basis.num_exp_coeffs())
        throw InvalidArgumentError(args.params + ": coefficient counts do not match the basis");

    const auto image = io::load_image(args.image);

    const auto mesh = model::synthesize_shape(basis, params.id_coeffs, params.exp_coeffs);
    const auto visibility = tex::visibility_mask(mesh, params, args.raster_size);
    const auto rot = model::rotation_from_euler(params.pitch, params.yaw, params.roll);
    const auto projected = model::project_vertices(mesh, params.scale, rot, params.translation);
    const auto raw = tex::extract_vertex_colors(image, projected, visibility);
    const auto filled = tex::symmetry_fill(raw, *basis.mirror_map);
    const auto atlas = tex::bake_uv_atlas(basis, filled.colors, args.resolution);

    model::FaceMesh textured = mesh;
    textured.colors = filled.colors;

    OutputStager stager;
    const auto mesh_tmp = stager.stage(args.out_mesh);
    stager.stage(std::filesystem::path(args.out_mesh).replace_extension(".mtl")); // written by the exporter
    const auto atlas_tmp = stager.stage(args.out_atlas);
    io::save_image(atlas.image, atlas_tmp);
    io::export_mesh(textured, io::MeshFormat::Obj, mesh_tmp, basis.uv_coords,
                    std::filesystem::path(args.out_atlas).filename().string());
    stager.commit();

    std::size_t visible = 0;
    for (const auto v : visibility)
        visible += v;
    std::cout << "visible_vertices: " << visible << "/" << visibility.size() << "\n";
    return kExitOk;
}

// -------------------------------------------------------------- metrics --

struct MetricsArgs
{
    std::string pairs, out, config;
    bool strict = false;
    int threads = 0;
};

int cmd_metrics(const MetricsArgs& args)
{
    std::ifstream in(args.pairs);
    if (!in)
        throw IoError("cannot open " + args.pairs);
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw SchemaError(args.pairs + ": each line must be 'image_a,image_b', got: " + line);
        rows.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }

    struct RowResult
    {
        bool ok = false;
        std::string error;
        metrics::MetricReport report;
    };
    std::vector<RowResult> results(rows.size());

    int workers = args.threads > 0 ? args.threads
                                   : static_cast<int>(std::min<std::size_t>(
                                         rows.size(), std::thread::hardware_concurrency()));
    workers = std::max(workers, 1);

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= rows.size())
                return;
            try
            {
                const auto a = io::load_image(rows[i].first);
                const auto b = io::load_image(rows[i].second);
                results[i].report = metrics::evaluate_pair(a, b);
                results[i].ok = true;
            }
            catch (const std::exception& e)
            {
                results[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();

    bool any_error = false;
    std::ostringstream csv;
    csv << "image_a,image_b,ssim,ms_ssim,fsim\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        csv << rows[i].first << ',' << rows[i].second << ',';
        if (results[i].ok)
            csv << format_double(results[i].report.ssim) << ','
                << format_double(results[i].report.ms_ssim) << ','
                << format_double(results[i].report.fsim) << "\n";
        else
        {
            csv << "error,error,error\n";
            std::cerr << "error: " << rows[i].first << "," << rows[i].second << ": "
                      << results[i].error << "\n";
            any_error = true;
        }
    }
    if (any_error && args.strict)
        return kExitData; // nothing written under --strict failure

    OutputStager stager;
    {
        std::ofstream f(stager.stage(args.out));
        f << csv.str();
        if (!f)
            throw IoError("write failed for " + args.out);
    }
    stager.commit();
    return kExitOk;
}

// ---------------------------------------------------------------- stats --

struct StatsArgs
{
    std::string mesh, out, config;
    int samples = 50;
    std::uint64_t seed = 0;
};

int cmd_stats(const StatsArgs& args)
{
    const auto mesh = io::load_mesh(args.mesh);
    const auto stats = metrics::mesh_stats(mesh, args.samples, args.seed);

    OutputStager stager;
    {
        std::ofstream f(stager.stage(args.out));
        f << "mesh,triangles,avg_triangle_area,seed\n"
          << args.mesh << ',' << stats.triangle_count << ','
          << format_double(stats.avg_triangle_area) << ',' << stats.sample_seed << "\n";
        if (!f)
            throw IoError("write failed for " + args.out);
    }
    stager.commit();

    std::cout << "triangles: " << stats.triangle_count
              << "\navg_triangle_area: " << format_double(stats.avg_triangle_area) << "\n";
    return kExitOk;
}

} // namespace

namespace {

int run(int argc, char** argv)
{
    CLI::App app{"facekit - morphable face model synthesis, fitting, alignment, texture and metrics"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "synthesize a mesh from basis coefficients");
    synth_cmd->add_option("--basis", synth.basis, "morphable basis container")->required();
    auto* synth_id = synth_cmd->add_option("--id-coeffs", synth.id_csv, "comma-separated identity coefficients");
    auto* synth_exp = synth_cmd->add_option("--exp-coeffs", synth.exp_csv, "comma-separated expression coefficients");
    synth_cmd->add_option("--out", synth.out, "output mesh path (.obj or .ply)")->required();
    auto* synth_fmt = synth_cmd->add_option("--format", synth.format, "obj|ply (default: by extension)");
    synth_cmd->add_option("--config", synth.config, "JSON config file (flags override)");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit model parameters to observed 2D landmarks");
    fit_cmd->add_option("--basis", fit.basis, "morphable basis container")->required();
    fit_cmd->add_option("--landmarks", fit.landmarks, "observed landmark JSON")->required();
    fit_cmd->add_option("--out-params", fit.out_params, "fitted parameter JSON output")->required();
    fit_cmd->add_flag("--meta-joint", fit.meta_joint, "use meta-joint branch selection");
    fit_cmd->add_flag("--strict", fit.strict, "exit 3 on non-convergence");
    auto* fit_seed = fit_cmd->add_option("--seed", fit.fit.rng_seed, "meta train/test split seed");
    auto* fit_iters = fit_cmd->add_option("--max-iters", fit.fit.max_iterations, "accepted-step budget");
    auto* fit_tol = fit_cmd->add_option("--tol", fit.fit.convergence_tol, "relative cost decrease tolerance");
    auto* fit_id_reg = fit_cmd->add_option("--id-reg", fit.fit.id_regularization, "identity regularization");
    auto* fit_exp_reg = fit_cmd->add_option("--exp-reg", fit.fit.exp_regularization, "expression regularization");
    auto* fit_meta_k = fit_cmd->add_option("--meta-k", fit.fit.meta_k, "lookahead steps per branch");
    auto* fit_meta_frac =
        fit_cmd->add_option("--meta-test-fraction", fit.fit.meta_test_fraction, "held-out landmark fraction");
    fit_cmd->add_option("--config", fit.config, "JSON config file (flags override)");

    AlignArgs al;
    auto* align_cmd = app.add_subcommand("align", "pseudo rigid transform between landmark sets");
    align_cmd->add_option("--unaligned-landmarks", al.unaligned, "unaligned landmark JSON")->required();
    align_cmd->add_option("--aligned-landmarks", al.aligned, "aligned landmark JSON")->required();
    align_cmd->add_option("--image", al.image, "image to warp by the recovered transform");
    align_cmd->add_option("--out", al.out, "warped image output path");
    auto* align_center =
        align_cmd->add_option("--center", al.center, "rotation centre x,y (default: image centre or 0,0)")
            ->expected(2)
            ->delimiter(',');
    align_cmd->add_option("--config", al.config, "JSON config file (flags override)");

    TextureArgs tex_args;
    auto* tex_cmd = app.add_subcommand("texture", "extract per-vertex colors and bake a UV atlas");
    tex_cmd->add_option("--basis", tex_args.basis, "morphable basis container (UV + mirror map)")->required();
    tex_cmd->add_option("--params", tex_args.params, "fitted parameter JSON")->required();
    tex_cmd->add_option("--image", tex_args.image, "source image")->required();
    tex_cmd->add_option("--out-mesh", tex_args.out_mesh, "textured OBJ output")->required();
    tex_cmd->add_option("--out-atlas", tex_args.out_atlas, "atlas PNG output")->required();
    auto* tex_res = tex_cmd->add_option("--resolution", tex_args.resolution, "atlas side (power of two >= 64)");
    auto* tex_raster = tex_cmd->add_option("--raster-size", tex_args.raster_size, "visibility raster side");
    tex_cmd->add_option("--config", tex_args.config, "JSON config file (flags override)");

    MetricsArgs met;
    auto* metrics_cmd = app.add_subcommand(
        "metrics", "SSIM/MS-SSIM/FSIM over image pairs (LPIPS is not implemented: it would "
                   "require pretrained network weights)");
    metrics_cmd->add_option("--pairs", met.pairs, "CSV of image_a,image_b rows")->required();
    metrics_cmd->add_option("--out", met.out, "output CSV")->required();
    metrics_cmd->add_flag("--strict", met.strict, "nonzero exit when any pair fails to load");
    auto* met_threads = metrics_cmd->add_option("--threads", met.threads, "worker threads (default: cores)");
    metrics_cmd->add_option("--config", met.config, "JSON config file (flags override)");

    StatsArgs st;
    auto* stats_cmd = app.add_subcommand("stats", "triangle count and sampled average triangle area");
    stats_cmd->add_option("--mesh", st.mesh, "mesh file (.obj or .ply)")->required();
    stats_cmd->add_option("--out", st.out, "output CSV")->required();
    auto* st_samples = stats_cmd->add_option("--samples", st.samples, "sampled vertex count");
    auto* st_seed = stats_cmd->add_option("--seed", st.seed, "sampling seed");
    stats_cmd->add_option("--config", st.config, "JSON config file (flags override)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        // collapse CLI11's exit-code palette onto the documented contract
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try
    {
        if (synth_cmd->parsed())
        {
            const json cfg = load_config_file(synth.config);
            merge_config(cfg, synth_id, "id-coeffs", synth.id_csv);
            merge_config(cfg, synth_exp, "exp-coeffs", synth.exp_csv);
            merge_config(cfg, synth_fmt, "format", synth.format);
            return cmd_synth(synth);
        }
        if (fit_cmd->parsed())
        {
            const json cfg = load_config_file(fit.config);
            merge_config(cfg, fit_seed, "seed", fit.fit.rng_seed);
            merge_config(cfg, fit_iters, "max-iters", fit.fit.max_iterations);
            merge_config(cfg, fit_tol, "tol", fit.fit.convergence_tol);
            merge_config(cfg, fit_id_reg, "id-reg", fit.fit.id_regularization);
            merge_config(cfg, fit_exp_reg, "exp-reg", fit.fit.exp_regularization);
            merge_config(cfg, fit_meta_k, "meta-k", fit.fit.meta_k);
            merge_config(cfg, fit_meta_frac, "meta-test-fraction", fit.fit.meta_test_fraction);
            return cmd_fit(fit);
        }
        if (align_cmd->parsed())
        {
            const json cfg = load_config_file(al.config);
            merge_config(cfg, align_center, "center", al.center);
            return cmd_align(al);
        }
        if (tex_cmd->parsed())
        {
            const json cfg = load_config_file(tex_args.config);
            merge_config(cfg, tex_res, "resolution", tex_args.resolution);
            merge_config(cfg, tex_raster, "raster-size", tex_args.raster_size);
            return cmd_texture(tex_args);
        }
        if (metrics_cmd->parsed())
        {
            const json cfg = load_config_file(met.config);
            merge_config(cfg, met_threads, "threads", met.threads);
            return cmd_metrics(met);
        }
        if (stats_cmd->parsed())
        {
            const json cfg = load_config_file(st.config);
            merge_config(cfg, st_samples, "samples", st.samples);
            merge_config(cfg, st_seed, "seed", st.seed);
            return cmd_stats(st);
        }
    }
    catch (const UsageError& e)
    {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const NumericalError& e)
    {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    catch (const Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv)
{
    try
    {
        return run(argc, argv);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    catch (...)
    {
        std::cerr << "error: unknown failure\n";
        return kExitData;
    }
}
