#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gw/csv.hpp"
#include "gw/image.hpp"
#include "gw/sanitize.hpp"
#include "gw/stego_channel.hpp"

namespace gw {

// One point of the method grid. `method` is one of: identity, blur, resize,
// dctq, diff1, ads-fgsm, ads-qdir; the parameter that applies to the kind is
// read, the rest are ignored.
struct MethodSpec {
    std::string method;
    double eps_adv = 0.0;
    double sigma = 0.5;
    double factor = 7.0 / 8.0;
    int quality = 90;

    std::string params_label() const;
};

struct ExperimentConfig {
    int n_images = 64;
    int height = 64;
    int width = 64;
    int payload_bits = 64;
    int repetition = 3;
    CodecConfig::Kind codec_kind = CodecConfig::Kind::Sign;
    std::string base_key = "gateway-base";

    // Carrier chain (encode/decode).
    double codec_sigma = 0.25;
    int codec_T = 10;
    double codec_beta0 = 1e-5;
    double codec_beta1 = 1e-4;
    int refine_iters = 8;
    double codec_sigma0 = 0.005;  // stream codec only

    // Proxy chain driving the sanitizer (ads-* and diff1 methods).
    double proxy_sigma = 0.35;
    int proxy_T = 10;
    double proxy_beta0 = 1e-9;
    double proxy_beta1 = 0.02;
    int ads_t = 1;
    double delta = 1e-8;

    double threshold = 0.48;  // BER above this counts as decode failure
    std::vector<MethodSpec> methods;
    std::optional<double> distortion_budget;  // budget on 1 - SSIM
    std::string output_dir = "out";
    int threads = 0;  // 0 = hardware concurrency
};

// The frozen configuration behind the reported sweep numbers: capacity-full
// sign codec on a slow-inverting carrier chain, full method grid with the
// eps_adv sweep {0, 0.005, 0.01, 0.02} for both ADS variants.
ExperimentConfig calibrated_sweep_config();

struct EvalRecord {
    std::string method;
    std::string params;
    int n_images = 0;
    double failure_rate_percent = 0.0;
    double mean_ber = 0.0;
    double mean_psnr_db = 0.0;
    double mean_ssim = 0.0;
    double mean_one_minus_ssim = 0.0;
    bool budget_violated = false;
    double wall_ms_per_image = 0.0;
};

struct PerImageRecord {
    std::string method;
    std::string params;
    int index = 0;
    double ber = 0.0;
    bool success = false;
    double psnr_db = 0.0;
    double ssim = 0.0;
    double wall_ms = 0.0;
};

struct SweepResult {
    std::vector<EvalRecord> records;
    std::vector<PerImageRecord> per_image;
};

// Writes n_images 16-bit carrier PNGs plus manifest.json (payload hex, keys,
// stream ids) into cfg.output_dir.
void run_generate(const ExperimentConfig& cfg);

// Encodes every carrier in memory, applies every method point, decodes the
// result directly (tensor path, no PNG round trip), and writes sweep.csv and
// per_image.csv into cfg.output_dir. Wall-clock columns come last so
// determinism checks can strip them.
SweepResult run_sweep(const ExperimentConfig& cfg);

// Reads an aggregate sweep CSV and emits frontier.svg plus pareto.csv (the
// rows not dominated on the failure-vs-distortion plane).
void run_frontier(const std::string& sweep_csv, const std::string& out_svg,
                  const std::string& out_pareto_csv);

// Per-image key derivation: "<base>#<index>".
std::string derive_image_key(const std::string& base, int index);

std::string bits_to_hex(const std::vector<uint8_t>& bits);
std::vector<uint8_t> hex_to_bits(const std::string& hex, int nbits);

// Applies one method point to a carrier. image_key seeds the sanitizer's
// keyed noise draw.
ImageTensor apply_method(const MethodSpec& m, const ImageTensor& carrier,
                         const std::string& image_key,
                         const ExperimentConfig& cfg,
                         const NoiseSchedule& proxy_sched,
                         const Denoiser& proxy_den);

// Plain key = value text (one pair per line, # comments). Unknown keys are
// an error so typos surface instead of silently using defaults.
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config(ExperimentConfig& cfg,
                  const std::map<std::string, std::string>& kv);
std::vector<MethodSpec> parse_methods(const std::string& grid);

std::vector<CsvRow> sweep_csv_rows(const SweepResult& res);
std::vector<CsvRow> per_image_csv_rows(const SweepResult& res);

}  // namespace gw
