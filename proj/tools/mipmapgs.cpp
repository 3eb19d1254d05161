// mipmapgs: fit / adapt / render / eval / pseudo-gt / toy1d pipelines over
// the Gaussian-splatting engine, with file-based scenes and reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mipmapgs/adapt.hpp"
#include "mipmapgs/fit.hpp"
#include "mipmapgs/metrics.hpp"
#include "mipmapgs/mipmap.hpp"
#include "mipmapgs/ppm.hpp"
#include "mipmapgs/rasterizer.hpp"
#include "mipmapgs/scene_io.hpp"
#include "mipmapgs/scenegen.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mgs;

namespace {

struct AppConfig {
    RenderConfig render;
    TeacherSpec teacher;
    OptimParams optim;
    DensityControlConfig density;
    FitConfig fit;
    AdaptConfig adapt;
    Toy1DSpec toy;
};

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
    throw InvalidConfig("unknown config key: " + section + "." + key);
}

template <typename T>
void take(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void check_keys(const json& obj, const std::string& section, std::initializer_list<const char*> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) bad_key(section, it.key());
    }
}

Kernel parse_kernel(const std::string& name) {
    if (name == "bilinear") return Kernel::Bilinear;
    if (name == "lanczos3") return Kernel::Lanczos3;
    if (name == "bicubic") return Kernel::Bicubic;
    if (name == "nearest") return Kernel::NearestNeighbor;
    throw InvalidConfig("unknown kernel: " + name);
}
std::string kernel_name(Kernel k) {
    switch (k) {
        case Kernel::Bilinear: return "bilinear";
        case Kernel::Lanczos3: return "lanczos3";
        case Kernel::Bicubic: return "bicubic";
        default: return "nearest";
    }
}

LossKind parse_loss(const std::string& name) {
    if (name == "l2") return LossKind::l2();
    if (name == "l1") return LossKind::l1();
    if (name == "l1_dssim") return LossKind::l1_dssim();
    if (name == "ssim") return LossKind::ssim_only();
    throw InvalidConfig("unknown loss: " + name);
}
std::string loss_name(LossKind kind) {
    switch (kind.kind) {
        case LossKind::L2: return "l2";
        case LossKind::L1: return "l1";
        case LossKind::L1_DSSIM: return "l1_dssim";
        default: return "ssim";
    }
}

ViewSource parse_view_source(const std::string& name) {
    if (name == "test") return ViewSource::Test;
    if (name == "train") return ViewSource::Train;
    if (name == "synthetic") return ViewSource::Synthetic;
    throw InvalidConfig("unknown view source: " + name);
}
std::string view_source_name(ViewSource s) {
    switch (s) {
        case ViewSource::Test: return "test";
        case ViewSource::Train: return "train";
        default: return "synthetic";
    }
}

AppConfig load_config(const std::string& path) {
    AppConfig cfg;
    if (path.empty()) return cfg;
    json root = json::parse(read_file(path));
    check_keys(root, "(top)", {"render", "teacher", "optim", "density", "fit", "adapt", "toy1d"});

    if (root.contains("render")) {
        const json& r = root["render"];
        check_keys(r, "render", {"tile_size", "transmittance_floor", "background", "filter", "dilation_s"});
        take(r, "tile_size", cfg.render.tile_size);
        take(r, "transmittance_floor", cfg.render.transmittance_floor);
        if (r.contains("background")) {
            auto bg = r["background"].get<std::vector<double>>();
            if (bg.size() != 3) throw InvalidConfig("render.background must have 3 entries");
            cfg.render.background = {bg[0], bg[1], bg[2]};
        }
        std::string filter = cfg.render.filter.kind == FilterMode::None ? "none" : "dilation";
        take(r, "filter", filter);
        double s = cfg.render.filter.s;
        take(r, "dilation_s", s);
        if (filter == "none")
            cfg.render.filter = FilterMode::none();
        else if (filter == "dilation")
            cfg.render.filter = FilterMode::dilation(s);
        else
            throw InvalidConfig("render.filter must be 'none' or 'dilation'");
    }
    if (root.contains("teacher")) {
        const json& t = root["teacher"];
        check_keys(t, "teacher",
                   {"seed", "primitive_count", "extent", "cameras", "ring_radius", "elev_min_deg",
                    "elev_max_deg", "width", "height", "fov_y_deg", "sigma_min", "sigma_max"});
        take(t, "seed", cfg.teacher.seed);
        take(t, "primitive_count", cfg.teacher.primitive_count);
        take(t, "extent", cfg.teacher.extent);
        take(t, "cameras", cfg.teacher.cameras);
        take(t, "ring_radius", cfg.teacher.ring_radius);
        take(t, "elev_min_deg", cfg.teacher.elev_min_deg);
        take(t, "elev_max_deg", cfg.teacher.elev_max_deg);
        take(t, "width", cfg.teacher.width);
        take(t, "height", cfg.teacher.height);
        take(t, "fov_y_deg", cfg.teacher.fov_y_deg);
        take(t, "sigma_min", cfg.teacher.sigma_min);
        take(t, "sigma_max", cfg.teacher.sigma_max);
    }
    if (root.contains("optim")) {
        const json& o = root["optim"];
        check_keys(o, "optim", {"lr_position", "lr_rotation", "lr_scale", "lr_opacity", "lr_sh"});
        take(o, "lr_position", cfg.optim.lr_position);
        take(o, "lr_rotation", cfg.optim.lr_rotation);
        take(o, "lr_scale", cfg.optim.lr_scale);
        take(o, "lr_opacity", cfg.optim.lr_opacity);
        take(o, "lr_sh", cfg.optim.lr_sh);
    }
    if (root.contains("density")) {
        const json& d = root["density"];
        check_keys(d, "density",
                   {"grad_threshold", "scale_split_threshold", "opacity_prune_threshold", "interval",
                    "split_factor", "active_pruning"});
        take(d, "grad_threshold", cfg.density.grad_threshold);
        take(d, "scale_split_threshold", cfg.density.scale_split_threshold);
        take(d, "opacity_prune_threshold", cfg.density.opacity_prune_threshold);
        take(d, "interval", cfg.density.interval);
        take(d, "split_factor", cfg.density.split_factor);
        take(d, "active_pruning", cfg.density.active_pruning);
    }
    if (root.contains("fit")) {
        const json& f = root["fit"];
        check_keys(f, "fit",
                   {"iterations", "init_count", "loss", "rng_seed", "density_stop_fraction",
                    "init_scale_frac", "init_opacity"});
        take(f, "iterations", cfg.fit.iterations);
        take(f, "init_count", cfg.fit.init_count);
        if (f.contains("loss")) cfg.fit.loss = parse_loss(f["loss"].get<std::string>());
        take(f, "rng_seed", cfg.fit.rng_seed);
        take(f, "density_stop_fraction", cfg.fit.density_stop_fraction);
        take(f, "init_scale_frac", cfg.fit.init_scale_frac);
        take(f, "init_opacity", cfg.fit.init_opacity);
    }
    if (root.contains("adapt")) {
        const json& a = root["adapt"];
        check_keys(a, "adapt",
                   {"iterations", "loss", "view_source", "synthetic_count", "rng_seed", "down_kernel",
                    "up_kernel"});
        take(a, "iterations", cfg.adapt.iterations);
        if (a.contains("loss")) cfg.adapt.loss = parse_loss(a["loss"].get<std::string>());
        if (a.contains("view_source"))
            cfg.adapt.view_source = parse_view_source(a["view_source"].get<std::string>());
        take(a, "synthetic_count", cfg.adapt.synthetic_count);
        take(a, "rng_seed", cfg.adapt.rng_seed);
        if (a.contains("down_kernel")) cfg.adapt.down_kernel = parse_kernel(a["down_kernel"].get<std::string>());
        if (a.contains("up_kernel")) cfg.adapt.up_kernel = parse_kernel(a["up_kernel"].get<std::string>());
    }
    if (root.contains("toy1d")) {
        const json& t = root["toy1d"];
        check_keys(t, "toy1d", {"means", "sigmas", "amplitudes", "spacing", "domain", "zooms", "dilation_s"});
        take(t, "means", cfg.toy.means);
        take(t, "sigmas", cfg.toy.sigmas);
        take(t, "amplitudes", cfg.toy.amplitudes);
        take(t, "spacing", cfg.toy.spacing);
        take(t, "domain", cfg.toy.domain);
        take(t, "zooms", cfg.toy.zooms);
        take(t, "dilation_s", cfg.toy.dilation_s);
    }
    return cfg;
}

// MIPMAPGS_SEED overrides the config-file seeds; explicit --seed flags win
// over both (applied later).
void apply_env(AppConfig& cfg) {
    if (const char* s = std::getenv("MIPMAPGS_SEED")) {
        std::uint64_t seed = std::strtoull(s, nullptr, 10);
        cfg.fit.rng_seed = seed;
        cfg.adapt.rng_seed = seed;
    }
}

double parse_zoom(const std::string& text) {
    auto slash = text.find('/');
    double value = 0.0;
    if (slash == std::string::npos) {
        value = std::atof(text.c_str());
    } else {
        double num = std::atof(text.substr(0, slash).c_str());
        double den = std::atof(text.substr(slash + 1).c_str());
        if (den == 0.0) throw InvalidZoom("zoom denominator is zero: " + text);
        value = num / den;
    }
    if (!(value > 0.0)) throw InvalidZoom("zoom must be positive: " + text);
    return value;
}

json config_echo(const AppConfig& cfg) {
    json j;
    j["render"] = {{"tile_size", cfg.render.tile_size},
                   {"transmittance_floor", cfg.render.transmittance_floor},
                   {"background", {cfg.render.background.x, cfg.render.background.y, cfg.render.background.z}},
                   {"filter", cfg.render.filter.kind == FilterMode::None ? "none" : "dilation"},
                   {"dilation_s", cfg.render.filter.s}};
    j["teacher"] = {{"seed", cfg.teacher.seed},
                    {"primitive_count", cfg.teacher.primitive_count},
                    {"extent", cfg.teacher.extent},
                    {"cameras", cfg.teacher.cameras},
                    {"ring_radius", cfg.teacher.ring_radius},
                    {"elev_min_deg", cfg.teacher.elev_min_deg},
                    {"elev_max_deg", cfg.teacher.elev_max_deg},
                    {"width", cfg.teacher.width},
                    {"height", cfg.teacher.height},
                    {"fov_y_deg", cfg.teacher.fov_y_deg},
                    {"sigma_min", cfg.teacher.sigma_min},
                    {"sigma_max", cfg.teacher.sigma_max}};
    j["optim"] = {{"lr_position", cfg.optim.lr_position},
                  {"lr_rotation", cfg.optim.lr_rotation},
                  {"lr_scale", cfg.optim.lr_scale},
                  {"lr_opacity", cfg.optim.lr_opacity},
                  {"lr_sh", cfg.optim.lr_sh}};
    j["density"] = {{"grad_threshold", cfg.density.grad_threshold},
                    {"scale_split_threshold", cfg.density.scale_split_threshold},
                    {"opacity_prune_threshold", cfg.density.opacity_prune_threshold},
                    {"interval", cfg.density.interval},
                    {"split_factor", cfg.density.split_factor},
                    {"active_pruning", cfg.density.active_pruning}};
    j["fit"] = {{"iterations", cfg.fit.iterations},
                {"init_count", cfg.fit.init_count},
                {"loss", loss_name(cfg.fit.loss)},
                {"rng_seed", cfg.fit.rng_seed},
                {"density_stop_fraction", cfg.fit.density_stop_fraction},
                {"init_scale_frac", cfg.fit.init_scale_frac},
                {"init_opacity", cfg.fit.init_opacity}};
    j["adapt"] = {{"iterations", cfg.adapt.iterations},
                  {"loss", loss_name(cfg.adapt.loss)},
                  {"view_source", view_source_name(cfg.adapt.view_source)},
                  {"synthetic_count", cfg.adapt.synthetic_count},
                  {"rng_seed", cfg.adapt.rng_seed},
                  {"down_kernel", kernel_name(cfg.adapt.down_kernel)},
                  {"up_kernel", kernel_name(cfg.adapt.up_kernel)}};
    return j;
}

json metrics_json(const MetricReport& rep) {
    auto num_or_inf = [](double v) -> json {
        if (std::isinf(v)) return "inf";
        return v;
    };
    json per_view = json::array();
    for (const ViewMetrics& vm : rep.per_view) {
        json entry = {{"view", vm.view}, {"psnr", num_or_inf(vm.psnr)}};
        entry["ssim"] = vm.has_ssim ? json(vm.ssim) : json(nullptr);
        per_view.push_back(entry);
    }
    json j;
    j["psnr_mean"] = num_or_inf(rep.psnr_mean);
    j["ssim_mean"] = rep.has_ssim ? json(rep.ssim_mean) : json(nullptr);
    j["lpips"] = nullptr;  // out of scope; placeholder for format compatibility
    j["per_view"] = per_view;
    return j;
}

void write_report(const std::string& path, const json& j) {
    if (path.empty()) return;
    write_file_atomic(path, j.dump(2) + "\n");
}

std::vector<Camera> pick_views(const TeacherScene& teacher, const std::string& which) {
    if (which == "train") return train_split(teacher.views);
    if (which == "test") return test_split(teacher.views);
    if (which == "all") return teacher.views;
    throw InvalidConfig("views must be test|train|all, got " + which);
}

MetricReport eval_scene(const Scene& scene, const std::vector<Camera>& views, double zoom,
                        const AppConfig& cfg, const std::string& reference) {
    std::vector<ImageBuffer> rendered, ref;
    TeacherScene teacher;
    bool use_teacher = reference == "teacher";
    if (use_teacher) teacher = generate_teacher(cfg.teacher);
    for (size_t i = 0; i < views.size(); ++i) {
        Camera cam = scale_camera(views[i], zoom);
        rendered.push_back(render(scene, cam, cfg.render));
        if (use_teacher) {
            ref.push_back(render(teacher.scene, cam, cfg.render));
        } else {
            char name[32];
            std::snprintf(name, sizeof(name), "view_%03d.ppm", int(i));
            ImageBuffer img = read_ppm((fs::path(reference) / name).string());
            if (img.width != cam.width || img.height != cam.height)
                throw DimensionMismatch("eval: reference " + std::string(name) + " is " +
                                        std::to_string(img.width) + "x" + std::to_string(img.height) +
                                        " but the render is " + std::to_string(cam.width) + "x" +
                                        std::to_string(cam.height));
            ref.push_back(std::move(img));
        }
    }
    return compare_views(rendered, ref);
}

int cmd_make_teacher(const AppConfig& cfg, const std::string& out) {
    TeacherScene teacher = generate_teacher(cfg.teacher);
    save_scene(teacher.scene, out);
    std::cout << "teacher scene: " << teacher.scene.count() << " primitives, " << teacher.views.size()
              << " cameras -> " << out << "\n";
    return 0;
}

int cmd_fit(const AppConfig& app, const std::string& out, const std::string& report_path) {
    TeacherScene teacher = generate_teacher(app.teacher);
    std::vector<Camera> train = train_split(teacher.views);
    std::vector<ImageBuffer> targets;
    targets.reserve(train.size());
    for (const Camera& cam : train) targets.push_back(render(teacher.scene, cam, app.render));

    FitConfig fit_cfg = app.fit;
    fit_cfg.extent = app.teacher.extent;
    fit_cfg.optim = app.optim;
    fit_cfg.density = app.density;
    FitResult result = fit_scene(train, targets, fit_cfg, app.render);
    save_scene(result.scene, out);

    std::vector<Camera> test = test_split(teacher.views);
    std::vector<ImageBuffer> rendered, reference;
    for (const Camera& cam : test) {
        rendered.push_back(render(result.scene, cam, app.render));
        reference.push_back(render(teacher.scene, cam, app.render));
    }
    MetricReport metrics = compare_views(rendered, reference);
    std::cout << "fit: K=" << result.scene.count() << ", test PSNR " << metrics.psnr_mean << " dB -> "
              << out << "\n";

    json j;
    j["command"] = "fit";
    j["config"] = config_echo(app);
    j["K"] = result.scene.count();
    j["metrics"] = metrics_json(metrics);
    write_report(report_path, j);
    return 0;
}

int cmd_adapt(const AppConfig& app, const std::string& scene_path, const std::string& scale_text,
              const std::string& out, const std::string& report_path) {
    Scene base = load_scene(scene_path);
    double zoom = parse_zoom(scale_text);
    TeacherScene teacher = generate_teacher(app.teacher);
    std::vector<Camera> views = select_views(test_split(teacher.views), train_split(teacher.views),
                                             app.adapt.view_source, app.adapt.synthetic_count,
                                             app.adapt.rng_seed);
    AdaptConfig cfg = app.adapt;
    cfg.scale_N = zoom;
    cfg.optim = app.optim;
    cfg.density = app.density;
    auto [scene, report] = adapt(base, views, cfg, app.render);
    save_scene(scene, out);

    std::cout << "adapt x" << zoom << ": K " << report.K_before << " -> " << report.K_after << ", "
              << report.loss_trace.size() << " iterations, " << report.wall_seconds << " s -> " << out
              << "\n";

    json j;
    j["command"] = "adapt";
    j["config"] = config_echo(app);
    j["scale"] = zoom;
    j["iterations"] = int(report.loss_trace.size());
    j["K_before"] = report.K_before;
    j["K_after"] = report.K_after;
    json per_view = json::array();
    for (const ViewMetrics& vm : report.per_view) {
        json entry = {{"view", vm.view},
                      {"psnr", std::isinf(vm.psnr) ? json("inf") : json(vm.psnr)}};
        entry["ssim"] = vm.has_ssim ? json(vm.ssim) : json(nullptr);
        per_view.push_back(entry);
    }
    j["per_view_vs_pseudo_gt"] = per_view;
    j["lpips"] = nullptr;
    j["loss_trace"] = report.loss_trace;
    write_report(report_path, j);
    return 0;
}

int cmd_render(const AppConfig& app, const std::string& scene_path, int view_index,
               const std::string& zoom_text, const std::string& out) {
    Scene scene = load_scene(scene_path);
    double zoom = parse_zoom(zoom_text);
    TeacherScene teacher = generate_teacher(app.teacher);
    if (view_index < 0 || view_index >= int(teacher.views.size()))
        throw InvalidConfig("view index out of range: " + std::to_string(view_index));
    Camera cam = scale_camera(teacher.views[size_t(view_index)], zoom);
    write_ppm(render(scene, cam, app.render), out);
    std::cout << "render view " << view_index << " x" << zoom << " (" << cam.width << "x" << cam.height
              << ") -> " << out << "\n";
    return 0;
}

int cmd_eval(const AppConfig& app, const std::string& scene_path, const std::string& zoom_text,
             const std::string& which_views, const std::string& reference,
             const std::string& report_path) {
    Scene scene = load_scene(scene_path);
    double zoom = parse_zoom(zoom_text);
    TeacherScene teacher = generate_teacher(app.teacher);
    std::vector<Camera> views = pick_views(teacher, which_views);
    if (views.empty()) throw EmptyViewSet("eval: no views selected");
    MetricReport metrics = eval_scene(scene, views, zoom, app, reference);
    std::cout << "eval x" << zoom << " on " << views.size() << " " << which_views
              << " views: PSNR " << metrics.psnr_mean << " dB\n";

    json j;
    j["command"] = "eval";
    j["config"] = config_echo(app);
    j["zoom"] = zoom;
    j["views"] = which_views;
    j["reference"] = reference;
    j["metrics"] = metrics_json(metrics);
    write_report(report_path, j);
    return 0;
}

int cmd_pseudo_gt(const AppConfig& app, const std::string& scene_path, const std::string& scale_text,
                  const std::string& which_views, const std::string& outdir) {
    Scene scene = load_scene(scene_path);
    double zoom = parse_zoom(scale_text);
    TeacherScene teacher = generate_teacher(app.teacher);
    std::vector<Camera> views = pick_views(teacher, which_views);
    auto pgt = make_pseudo_gt(scene, views, zoom, app.render, app.adapt.down_kernel, app.adapt.up_kernel);
    fs::create_directories(outdir);
    for (size_t i = 0; i < pgt.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "view_%03d.ppm", int(i));
        write_ppm(pgt[i].image, (fs::path(outdir) / name).string());
    }
    std::cout << "pseudo-gt x" << zoom << ": " << pgt.size() << " views -> " << outdir << "\n";
    return 0;
}

int cmd_toy1d(const AppConfig& app, const std::string& out) {
    auto rows = toy1d(app.toy);
    std::string csv = "zoom,cell_index,raw,dilated,n_contributors\n";
    char line[128];
    for (const Toy1DRow& row : rows) {
        std::snprintf(line, sizeof(line), "%.17g,%d,%.17g,%.17g,%d\n", row.zoom, row.cell, row.raw,
                      row.dilated, row.contributors);
        csv += line;
    }
    write_file_atomic(out, csv);
    std::cout << "toy1d: " << rows.size() << " rows -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale Gaussian splatting with mipmap test-time adaptation"};
    app.require_subcommand(1);

    std::string config_path, scene_path, out_path, report_path, zoom_text = "1", scale_text;
    std::string views = "test", reference = "teacher", outdir;
    int view_index = 0;
    std::optional<std::uint64_t> seed_flag;
    std::optional<int> iterations_flag, init_count_flag, synthetic_flag;
    std::optional<std::string> loss_flag, views_source_flag;

    app.add_option("--config", config_path, "JSON config file");

    CLI::App* mk = app.add_subcommand("make-teacher", "write the procedural teacher scene");
    mk->add_option("--out", out_path, "output scene file")->required();

    CLI::App* fit = app.add_subcommand("fit", "fit a fresh scene to teacher renders at x1");
    fit->add_option("--out", out_path, "output scene file")->required();
    fit->add_option("--report", report_path, "metrics report (json)");
    fit->add_option("--iterations", iterations_flag, "training iterations");
    fit->add_option("--init-count", init_count_flag, "initial primitive count");
    fit->add_option("--loss", loss_flag, "l2|l1|l1_dssim|ssim");
    fit->add_option("--seed", seed_flag, "rng seed");

    CLI::App* adapt_cmd = app.add_subcommand("adapt", "deform a scene toward a zoom factor");
    adapt_cmd->add_option("--scene", scene_path, "input scene file")->required();
    adapt_cmd->add_option("--scale", scale_text, "target zoom factor, e.g. 4 or 1/4")->required();
    adapt_cmd->add_option("--out", out_path, "output scene file")->required();
    adapt_cmd->add_option("--report", report_path, "adaptation report (json)");
    adapt_cmd->add_option("--iterations", iterations_flag, "adaptation iterations");
    adapt_cmd->add_option("--views", views_source_flag, "test|train|synthetic");
    adapt_cmd->add_option("--synthetic-count", synthetic_flag, "synthetic view count");
    adapt_cmd->add_option("--loss", loss_flag, "l2|l1|l1_dssim|ssim");
    adapt_cmd->add_option("--seed", seed_flag, "rng seed");

    CLI::App* render_cmd = app.add_subcommand("render", "render one view to a PPM image");
    render_cmd->add_option("--scene", scene_path, "scene file")->required();
    render_cmd->add_option("--view", view_index, "view index into the camera ring")->required();
    render_cmd->add_option("--zoom", zoom_text, "zoom factor, e.g. 2 or 1/8");
    render_cmd->add_option("--out", out_path, "output image (.ppm)")->required();

    CLI::App* eval_cmd = app.add_subcommand("eval", "render at a zoom factor and compare");
    eval_cmd->add_option("--scene", scene_path, "scene file")->required();
    eval_cmd->add_option("--zoom", zoom_text, "zoom factor");
    eval_cmd->add_option("--views", views, "test|train|all");
    eval_cmd->add_option("--reference", reference, "'teacher' or a directory of view_*.ppm");
    eval_cmd->add_option("--report", report_path, "metrics report (json)");

    CLI::App* pgt_cmd = app.add_subcommand("pseudo-gt", "write scale-specific pseudo ground truth");
    pgt_cmd->add_option("--scene", scene_path, "base scene file")->required();
    pgt_cmd->add_option("--scale", scale_text, "target zoom factor")->required();
    pgt_cmd->add_option("--views", views, "test|train|all");
    pgt_cmd->add_option("--outdir", outdir, "output directory")->required();

    CLI::App* toy_cmd = app.add_subcommand("toy1d", "emit the 1D sampling-rate table");
    toy_cmd->add_option("--out", out_path, "output csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        AppConfig cfg = load_config(config_path);
        apply_env(cfg);
        if (seed_flag) {
            cfg.fit.rng_seed = *seed_flag;
            cfg.adapt.rng_seed = *seed_flag;
        }
        if (iterations_flag) {
            cfg.fit.iterations = *iterations_flag;
            cfg.adapt.iterations = *iterations_flag;
        }
        if (init_count_flag) cfg.fit.init_count = *init_count_flag;
        if (loss_flag) {
            cfg.fit.loss = parse_loss(*loss_flag);
            cfg.adapt.loss = parse_loss(*loss_flag);
        }
        if (views_source_flag) cfg.adapt.view_source = parse_view_source(*views_source_flag);
        if (synthetic_flag) cfg.adapt.synthetic_count = *synthetic_flag;

        if (mk->parsed()) return cmd_make_teacher(cfg, out_path);
        if (fit->parsed()) return cmd_fit(cfg, out_path, report_path);
        if (adapt_cmd->parsed()) return cmd_adapt(cfg, scene_path, scale_text, out_path, report_path);
        if (render_cmd->parsed()) return cmd_render(cfg, scene_path, view_index, zoom_text, out_path);
        if (eval_cmd->parsed()) return cmd_eval(cfg, scene_path, zoom_text, views, reference, report_path);
        if (pgt_cmd->parsed()) return cmd_pseudo_gt(cfg, scene_path, scale_text, views, outdir);
        if (toy_cmd->parsed()) return cmd_toy1d(cfg, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
