#include "gw/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "gw/determinism.hpp"
#include "gw/png_io.hpp"
#include "gw/quality_metrics.hpp"
#include "gw/svg.hpp"

namespace gw {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Chains {
    NoiseSchedule codec_sched;
    NoiseSchedule proxy_sched;
    BlurDenoiser codec_den;
    BlurDenoiser proxy_den;

    explicit Chains(const ExperimentConfig& cfg)
        : codec_sched(make_schedule(cfg.codec_T, cfg.codec_beta0, cfg.codec_beta1)),
          proxy_sched(make_schedule(cfg.proxy_T, cfg.proxy_beta0, cfg.proxy_beta1)),
          codec_den(cfg.codec_sigma),
          proxy_den(cfg.proxy_sigma) {}

    CodecConfig codec_config(const ExperimentConfig& cfg,
                             const std::string& key) const {
        CodecConfig cc;
        cc.kind = cfg.codec_kind;
        cc.key = key;
        cc.ecc.scheme = EccConfig::Scheme::Repetition;
        cc.ecc.repetition_factor = cfg.repetition;
        cc.schedule = &codec_sched;
        cc.denoiser = &codec_den;
        cc.height = cfg.height;
        cc.width = cfg.width;
        cc.payload_len = cfg.payload_bits;
        cc.refine_iters = cfg.refine_iters;
        cc.sigma0 = cfg.codec_sigma0;
        return cc;
    }
};

void check_experiment(const ExperimentConfig& cfg, const char* where) {
    if (cfg.n_images < 1)
        throw std::invalid_argument(std::string(where) + ": n_images must be >= 1");
    if (cfg.payload_bits < 1)
        throw std::invalid_argument(std::string(where) +
                                    ": payload_bits must be >= 1");
}

// Index-parallel loop; with one worker it degenerates to a plain loop, and
// results are written by index so scheduling never affects output.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    int nt = threads > 0 ? threads
                         : static_cast<int>(std::thread::hardware_concurrency());
    if (nt < 1) nt = 1;
    nt = std::min(nt, n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    pool.reserve(static_cast<size_t>(nt));
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = w; i < n; i += nt) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

double mean_of(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double v : xs) acc += v;
    return acc / static_cast<double>(xs.size());
}

std::string codec_kind_name(CodecConfig::Kind k) {
    return k == CodecConfig::Kind::Sign ? "sign" : "stream";
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int out = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer for " + key + ": " + v);
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for " + key + ": " + v);
    }
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string MethodSpec::params_label() const {
    if (method == "identity") return "";
    if (method == "blur") return "sigma=" + csv_num(sigma);
    if (method == "resize") return "factor=" + csv_num(factor);
    if (method == "dctq") return "q=" + std::to_string(quality);
    if (method == "diff1") return "eps=0";
    if (method == "ads-fgsm" || method == "ads-qdir")
        return "eps=" + csv_num(eps_adv);
    return "";
}

ExperimentConfig calibrated_sweep_config() {
    ExperimentConfig cfg;
    cfg.n_images = 64;
    cfg.height = 64;
    cfg.width = 64;
    cfg.payload_bits = 12288;
    cfg.repetition = 1;
    cfg.codec_kind = CodecConfig::Kind::Sign;
    cfg.base_key = "sweep-base";
    cfg.codec_sigma = 0.75;
    cfg.codec_T = 256;
    cfg.codec_beta0 = 8e-9;
    cfg.codec_beta1 = 0.02;
    cfg.refine_iters = 1500;
    cfg.proxy_sigma = 0.35;
    cfg.proxy_T = 10;
    cfg.proxy_beta0 = 1e-9;
    cfg.proxy_beta1 = 0.02;
    cfg.ads_t = 1;
    cfg.delta = 1e-8;
    cfg.output_dir = "out";
    cfg.methods = parse_methods(
        "identity,blur:0.5,blur:1.0,resize:0.875,dctq:90,dctq:70,diff1,"
        "ads-fgsm:0.005,ads-fgsm:0.01,ads-fgsm:0.02,"
        "ads-qdir:0.005,ads-qdir:0.01,ads-qdir:0.02");
    return cfg;
}

std::string derive_image_key(const std::string& base, int index) {
    return base + "#" + std::to_string(index);
}

std::string bits_to_hex(const std::vector<uint8_t>& bits) {
    static const char* DIGITS = "0123456789abcdef";
    std::string out;
    out.reserve((bits.size() + 3) / 4);
    for (size_t i = 0; i < bits.size(); i += 4) {
        int nib = 0;
        for (size_t j = 0; j < 4; ++j) {
            nib <<= 1;
            if (i + j < bits.size() && bits[i + j] != 0) nib |= 1;
        }
        out += DIGITS[nib];
    }
    return out;
}

std::vector<uint8_t> hex_to_bits(const std::string& hex, int nbits) {
    if (nbits < 0) throw std::invalid_argument("hex_to_bits: negative length");
    if (hex.size() * 4 < static_cast<size_t>(nbits))
        throw std::invalid_argument("hex_to_bits: hex string too short");
    std::vector<uint8_t> bits(static_cast<size_t>(nbits));
    for (int i = 0; i < nbits; ++i) {
        const char c = hex[static_cast<size_t>(i / 4)];
        int nib;
        if (c >= '0' && c <= '9') nib = c - '0';
        else if (c >= 'a' && c <= 'f') nib = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') nib = c - 'A' + 10;
        else
            throw std::invalid_argument("hex_to_bits: invalid hex digit");
        bits[static_cast<size_t>(i)] =
            static_cast<uint8_t>((nib >> (3 - i % 4)) & 1);
    }
    return bits;
}

ImageTensor apply_method(const MethodSpec& m, const ImageTensor& carrier,
                         const std::string& image_key,
                         const ExperimentConfig& cfg,
                         const NoiseSchedule& proxy_sched,
                         const Denoiser& proxy_den) {
    if (m.method == "identity") return carrier;
    if (m.method == "blur") {
        BaselineConfig b;
        b.kind = BaselineKind::Blur;
        b.blur_sigma = m.sigma;
        return baseline_apply(carrier, b);
    }
    if (m.method == "resize") {
        BaselineConfig b;
        b.kind = BaselineKind::Resize;
        b.resize_factor = m.factor;
        return baseline_apply(carrier, b);
    }
    if (m.method == "dctq") {
        BaselineConfig b;
        b.kind = BaselineKind::DctQuantize;
        b.quality = m.quality;
        return baseline_apply(carrier, b);
    }
    AdsConfig a;
    a.t = cfg.ads_t;
    a.delta = cfg.delta;
    a.noise_stream = StreamKey{image_key, SID_NOISE, 0};
    a.schedule = &proxy_sched;
    a.denoiser = &proxy_den;
    if (m.method == "diff1") {
        a.eps_adv = 0.0;
        return ads_sanitize(carrier, a);
    }
    if (m.method == "ads-fgsm" || m.method == "ads-qdir") {
        a.eps_adv = m.eps_adv;
        a.update = m.method == "ads-fgsm" ? AdsUpdate::Fgsm : AdsUpdate::Qdir;
        return ads_sanitize(carrier, a);
    }
    throw std::invalid_argument("apply_method: unknown method " + m.method);
}

void run_generate(const ExperimentConfig& cfg) {
    check_experiment(cfg, "run_generate");
    const Chains chains(cfg);
    fs::create_directories(cfg.output_dir);

    json manifest;
    manifest["config"] = {
        {"n_images", cfg.n_images},
        {"height", cfg.height},
        {"width", cfg.width},
        {"payload_bits", cfg.payload_bits},
        {"repetition", cfg.repetition},
        {"codec", codec_kind_name(cfg.codec_kind)},
        {"base_key", cfg.base_key},
        {"codec_sigma", cfg.codec_sigma},
        {"codec_T", cfg.codec_T},
        {"codec_beta0", cfg.codec_beta0},
        {"codec_beta1", cfg.codec_beta1},
        {"refine_iters", cfg.refine_iters},
        {"codec_sigma0", cfg.codec_sigma0},
    };
    manifest["stream_ids"] = {
        {"latent", SID_LATENT},   {"perm", SID_PERM},
        {"stream_a", SID_STREAM_A}, {"stream_b", SID_STREAM_B},
        {"noise", SID_NOISE},     {"payload", SID_PAYLOAD},
    };

    std::vector<json> entries(static_cast<size_t>(cfg.n_images));
    std::vector<ImageTensor> carriers(static_cast<size_t>(cfg.n_images));
    parallel_for(cfg.n_images, cfg.threads, [&](int i) {
        const std::string key = derive_image_key(cfg.base_key, i);
        Payload p;
        p.bits = payload_bits(key, SID_PAYLOAD, cfg.payload_bits);
        const CodecConfig cc = chains.codec_config(cfg, key);
        carriers[static_cast<size_t>(i)] = codec_encode(p, cc).carrier;
        char name[32];
        std::snprintf(name, sizeof(name), "carrier_%03d.png", i);
        entries[static_cast<size_t>(i)] = {
            {"index", i},
            {"key", key},
            {"file", name},
            {"payload_hex", bits_to_hex(p.bits)},
            {"payload_bits", cfg.payload_bits},
        };
    });
    for (int i = 0; i < cfg.n_images; ++i) {
        const fs::path out = fs::path(cfg.output_dir) /
                             entries[static_cast<size_t>(i)]["file"]
                                 .get<std::string>();
        write_png16(out.string(), carriers[static_cast<size_t>(i)]);
    }
    manifest["images"] = entries;

    std::ofstream f(fs::path(cfg.output_dir) / "manifest.json",
                    std::ios::binary);
    if (!f)
        throw std::runtime_error("run_generate: cannot write manifest");
    f << manifest.dump(2) << "\n";
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    check_experiment(cfg, "run_sweep");
    if (cfg.methods.empty())
        throw std::invalid_argument("run_sweep: no methods configured");
    const Chains chains(cfg);
    const int n = cfg.n_images;

    std::vector<ImageTensor> carriers(static_cast<size_t>(n));
    std::vector<std::vector<uint8_t>> payloads(static_cast<size_t>(n));
    std::vector<CodecConfig> codecs(static_cast<size_t>(n));
    parallel_for(n, cfg.threads, [&](int i) {
        const std::string key = derive_image_key(cfg.base_key, i);
        codecs[static_cast<size_t>(i)] = chains.codec_config(cfg, key);
        Payload p;
        p.bits = payload_bits(key, SID_PAYLOAD, cfg.payload_bits);
        payloads[static_cast<size_t>(i)] = p.bits;
        carriers[static_cast<size_t>(i)] =
            codec_encode(p, codecs[static_cast<size_t>(i)]).carrier;
    });

    SweepResult res;
    for (const MethodSpec& m : cfg.methods) {
        std::vector<double> bers(static_cast<size_t>(n)),
            psnrs(static_cast<size_t>(n)), ssims(static_cast<size_t>(n)),
            walls(static_cast<size_t>(n));
        parallel_for(n, cfg.threads, [&](int i) {
            const auto t0 = std::chrono::steady_clock::now();
            const std::string key = derive_image_key(cfg.base_key, i);
            const ImageTensor out = apply_method(
                m, carriers[static_cast<size_t>(i)], key, cfg,
                chains.proxy_sched, chains.proxy_den);
            const DecodeResult dec =
                codec_decode(out, codecs[static_cast<size_t>(i)]);
            const MetricReport rep = evaluate_pair(
                carriers[static_cast<size_t>(i)], out,
                payloads[static_cast<size_t>(i)], dec.payload.bits,
                cfg.threshold);
            const auto t1 = std::chrono::steady_clock::now();
            bers[static_cast<size_t>(i)] = *rep.ber;
            psnrs[static_cast<size_t>(i)] = rep.psnr_db;
            ssims[static_cast<size_t>(i)] = rep.ssim;
            walls[static_cast<size_t>(i)] =
                std::chrono::duration<double, std::milli>(t1 - t0).count();
        });
        EvalRecord rec;
        rec.method = m.method;
        rec.params = m.params_label();
        rec.n_images = n;
        rec.failure_rate_percent = failure_rate_percent(bers, cfg.threshold);
        rec.mean_ber = mean_of(bers);
        rec.mean_psnr_db = mean_of(psnrs);
        rec.mean_ssim = mean_of(ssims);
        std::vector<double> dists(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            dists[static_cast<size_t>(i)] = 1.0 - ssims[static_cast<size_t>(i)];
        rec.mean_one_minus_ssim = mean_of(dists);
        rec.budget_violated = cfg.distortion_budget.has_value() &&
                              rec.mean_one_minus_ssim > *cfg.distortion_budget;
        rec.wall_ms_per_image = mean_of(walls);
        res.records.push_back(rec);
        for (int i = 0; i < n; ++i) {
            PerImageRecord pr;
            pr.method = m.method;
            pr.params = m.params_label();
            pr.index = i;
            pr.ber = bers[static_cast<size_t>(i)];
            pr.success = decode_success(pr.ber, cfg.threshold);
            pr.psnr_db = psnrs[static_cast<size_t>(i)];
            pr.ssim = ssims[static_cast<size_t>(i)];
            pr.wall_ms = walls[static_cast<size_t>(i)];
            res.per_image.push_back(pr);
        }
    }

    fs::create_directories(cfg.output_dir);
    write_csv((fs::path(cfg.output_dir) / "sweep.csv").string(),
              sweep_csv_rows(res));
    write_csv((fs::path(cfg.output_dir) / "per_image.csv").string(),
              per_image_csv_rows(res));
    return res;
}

std::vector<CsvRow> sweep_csv_rows(const SweepResult& res) {
    std::vector<CsvRow> rows;
    rows.push_back({"method", "params", "n_images", "failure_rate_percent",
                    "mean_ber", "mean_psnr_db", "mean_ssim",
                    "mean_one_minus_ssim", "budget_violated",
                    "wall_ms_per_image"});
    for (const EvalRecord& r : res.records)
        rows.push_back({r.method, r.params, std::to_string(r.n_images),
                        csv_num(r.failure_rate_percent), csv_num(r.mean_ber),
                        csv_num(r.mean_psnr_db), csv_num(r.mean_ssim),
                        csv_num(r.mean_one_minus_ssim),
                        r.budget_violated ? "1" : "0",
                        csv_num(r.wall_ms_per_image)});
    return rows;
}

std::vector<CsvRow> per_image_csv_rows(const SweepResult& res) {
    std::vector<CsvRow> rows;
    rows.push_back({"method", "params", "index", "ber", "success", "psnr_db",
                    "ssim", "wall_ms"});
    for (const PerImageRecord& r : res.per_image)
        rows.push_back({r.method, r.params, std::to_string(r.index),
                        csv_num(r.ber), r.success ? "1" : "0",
                        csv_num(r.psnr_db), csv_num(r.ssim),
                        csv_num(r.wall_ms)});
    return rows;
}

void run_frontier(const std::string& sweep_csv, const std::string& out_svg,
                  const std::string& out_pareto_csv) {
    const std::vector<CsvRow> rows = read_csv(sweep_csv);
    if (rows.size() < 2)
        throw std::runtime_error("run_frontier: sweep CSV has no data rows");
    const CsvRow& header = rows.front();
    auto col = [&](const std::string& name) {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("run_frontier: missing column " + name);
    };
    const size_t c_method = col("method");
    const size_t c_params = col("params");
    const size_t c_fail = col("failure_rate_percent");
    const size_t c_dist = col("mean_one_minus_ssim");

    struct Point {
        std::string method, params;
        double fail, dist;
        CsvRow raw;
    };
    std::vector<Point> pts;
    for (size_t i = 1; i < rows.size(); ++i) {
        const CsvRow& r = rows[i];
        if (r.size() <= std::max({c_method, c_params, c_fail, c_dist}))
            throw std::runtime_error("run_frontier: short row in sweep CSV");
        Point p;
        p.method = r[c_method];
        p.params = r[c_params];
        p.fail = std::stod(r[c_fail]);
        p.dist = std::stod(r[c_dist]);
        p.raw = r;
        pts.push_back(std::move(p));
    }

    std::vector<FrontierSeries> series;
    for (const Point& p : pts) {
        FrontierSeries* s = nullptr;
        for (FrontierSeries& fs : series)
            if (fs.label == p.method) s = &fs;
        if (!s) {
            series.push_back({p.method, {}});
            s = &series.back();
        }
        s->points.emplace_back(p.dist, p.fail);
    }
    write_frontier_svg(out_svg, series, "decoder failure vs distortion");

    std::vector<CsvRow> pareto;
    pareto.push_back(header);
    std::vector<size_t> keep;
    for (size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < pts.size() && !dominated; ++j) {
            if (i == j) continue;
            const bool ge = pts[j].fail >= pts[i].fail;
            const bool le = pts[j].dist <= pts[i].dist;
            const bool strict =
                pts[j].fail > pts[i].fail || pts[j].dist < pts[i].dist;
            dominated = ge && le && strict;
        }
        if (!dominated) keep.push_back(i);
    }
    std::sort(keep.begin(), keep.end(), [&](size_t a, size_t b) {
        return pts[a].dist < pts[b].dist;
    });
    for (size_t i : keep) pareto.push_back(pts[i].raw);
    write_csv(out_pareto_csv, pareto);
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("config: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (!val.empty() && val.front() == '"' && val.back() == '"' &&
            val.size() >= 2)
            val = val.substr(1, val.size() - 2);
        if (key.empty())
            throw std::runtime_error("config: empty key on line " +
                                     std::to_string(lineno));
        kv[key] = val;
    }
    return kv;
}

void apply_config(ExperimentConfig& cfg,
                  const std::map<std::string, std::string>& kv) {
    for (const auto& [key, val] : kv) {
        if (key == "n_images") cfg.n_images = parse_int(key, val);
        else if (key == "height") cfg.height = parse_int(key, val);
        else if (key == "width") cfg.width = parse_int(key, val);
        else if (key == "payload_bits") cfg.payload_bits = parse_int(key, val);
        else if (key == "repetition") cfg.repetition = parse_int(key, val);
        else if (key == "codec") {
            if (val == "sign") cfg.codec_kind = CodecConfig::Kind::Sign;
            else if (val == "stream") cfg.codec_kind = CodecConfig::Kind::Stream;
            else
                throw std::invalid_argument("config: codec must be sign or stream");
        } else if (key == "base_key") cfg.base_key = val;
        else if (key == "codec_sigma") cfg.codec_sigma = parse_double(key, val);
        else if (key == "codec_T") cfg.codec_T = parse_int(key, val);
        else if (key == "codec_beta0") cfg.codec_beta0 = parse_double(key, val);
        else if (key == "codec_beta1") cfg.codec_beta1 = parse_double(key, val);
        else if (key == "refine_iters") cfg.refine_iters = parse_int(key, val);
        else if (key == "codec_sigma0") cfg.codec_sigma0 = parse_double(key, val);
        else if (key == "proxy_sigma") cfg.proxy_sigma = parse_double(key, val);
        else if (key == "proxy_T") cfg.proxy_T = parse_int(key, val);
        else if (key == "proxy_beta0") cfg.proxy_beta0 = parse_double(key, val);
        else if (key == "proxy_beta1") cfg.proxy_beta1 = parse_double(key, val);
        else if (key == "ads_t") cfg.ads_t = parse_int(key, val);
        else if (key == "delta") cfg.delta = parse_double(key, val);
        else if (key == "threshold") cfg.threshold = parse_double(key, val);
        else if (key == "tau") cfg.distortion_budget = parse_double(key, val);
        else if (key == "output_dir") cfg.output_dir = val;
        else if (key == "threads") cfg.threads = parse_int(key, val);
        else if (key == "methods") cfg.methods = parse_methods(val);
        else
            throw std::invalid_argument("config: unknown key " + key);
    }
}

std::vector<MethodSpec> parse_methods(const std::string& grid) {
    std::vector<MethodSpec> out;
    size_t start = 0;
    while (start <= grid.size()) {
        size_t end = grid.find(',', start);
        if (end == std::string::npos) end = grid.size();
        const std::string item = trim(grid.substr(start, end - start));
        start = end + 1;
        if (item.empty()) continue;
        const size_t colon = item.find(':');
        MethodSpec m;
        m.method = colon == std::string::npos ? item : item.substr(0, colon);
        const std::string arg =
            colon == std::string::npos ? "" : item.substr(colon + 1);
        if (m.method == "identity" || m.method == "diff1") {
            if (!arg.empty())
                throw std::invalid_argument("methods: " + m.method +
                                            " takes no parameter");
        } else if (m.method == "blur") {
            if (arg.empty())
                throw std::invalid_argument("methods: blur needs a sigma");
            m.sigma = parse_double("blur", arg);
        } else if (m.method == "resize") {
            if (arg.empty())
                throw std::invalid_argument("methods: resize needs a factor");
            m.factor = parse_double("resize", arg);
        } else if (m.method == "dctq") {
            if (arg.empty())
                throw std::invalid_argument("methods: dctq needs a quality");
            m.quality = parse_int("dctq", arg);
        } else if (m.method == "ads-fgsm" || m.method == "ads-qdir") {
            if (arg.empty())
                throw std::invalid_argument("methods: " + m.method +
                                            " needs an eps value");
            m.eps_adv = parse_double(m.method, arg);
        } else {
            throw std::invalid_argument("methods: unknown method " + item);
        }
        out.push_back(std::move(m));
        if (end == grid.size()) break;
    }
    return out;
}

}  // namespace gw
