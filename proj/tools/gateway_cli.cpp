#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "gw/determinism.hpp"
#include "gw/harness.hpp"
#include "gw/png_io.hpp"
#include "gw/quality_metrics.hpp"

namespace {

std::string decode_hex_key(const std::string& hex) {
    if (hex.size() % 2 != 0)
        throw std::invalid_argument("--key-hex needs an even digit count");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("--key-hex has a non-hex digit");
    };
    std::string out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2)
        out += static_cast<char>(nib(hex[i]) * 16 + nib(hex[i + 1]));
    return out;
}

struct ConfigOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string base = "calibrated";
};

void add_config_opts(CLI::App* cmd, ConfigOpts& opts) {
    cmd->add_option("--config", opts.config_path,
                    "key = value config file (see README)");
    cmd->add_option("--set", opts.sets,
                    "override one config key, e.g. --set n_images=8")
        ->take_all();
    cmd->add_option("--base", opts.base,
                    "starting defaults: calibrated (the frozen sweep) or plain")
        ->check(CLI::IsMember({"calibrated", "plain"}));
}

gw::ExperimentConfig resolve_config(const ConfigOpts& opts) {
    gw::ExperimentConfig cfg = opts.base == "calibrated"
                                   ? gw::calibrated_sweep_config()
                                   : gw::ExperimentConfig{};
    if (!opts.config_path.empty())
        gw::apply_config(cfg, gw::parse_config_file(opts.config_path));
    std::map<std::string, std::string> kv;
    for (const std::string& s : opts.sets) {
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got " + s);
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    gw::apply_config(cfg, kv);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "gateway: diffusion-space sanitizer and toy stego-codec harness"};
    app.require_subcommand(1);

    ConfigOpts gen_opts, sweep_opts;
    std::string out_dir;

    CLI::App* gen = app.add_subcommand(
        "generate", "write a carrier corpus (16-bit PNGs + manifest.json)");
    add_config_opts(gen, gen_opts);
    gen->add_option("--out", out_dir, "output directory override");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "encode, sanitize, decode and score every method point");
    add_config_opts(sweep, sweep_opts);
    std::string sweep_out;
    sweep->add_option("--out", sweep_out, "output directory override");

    CLI::App* front = app.add_subcommand(
        "frontier", "render failure-vs-distortion SVG + Pareto CSV from a sweep");
    std::string front_in, front_svg = "frontier.svg", front_csv = "pareto.csv";
    front->add_option("--in", front_in, "aggregate sweep CSV")->required();
    front->add_option("--svg", front_svg, "output SVG path");
    front->add_option("--pareto", front_csv, "output Pareto CSV path");

    CLI::App* san = app.add_subcommand(
        "sanitize", "apply one method to a PNG (e.g. --method ads-fgsm:0.01)");
    std::string san_in, san_out, san_method = "ads-fgsm:0.01";
    std::string san_key, san_key_hex;
    int san_bits = 16;
    gw::ExperimentConfig san_cfg;
    san->add_option("--in", san_in, "input PNG")->required();
    san->add_option("--out", san_out, "output PNG")->required();
    san->add_option("--method", san_method,
                    "identity | blur:SIGMA | resize:FACTOR | dctq:Q | diff1 | "
                    "ads-fgsm:EPS | ads-qdir:EPS");
    san->add_option("--key", san_key, "noise key (UTF-8) for ads-*/diff1");
    san->add_option("--key-hex", san_key_hex, "noise key as hex bytes");
    san->add_option("--bits", san_bits, "output depth: 8 or 16")
        ->check(CLI::IsMember({8, 16}));
    san->add_option("--proxy-sigma", san_cfg.proxy_sigma, "proxy denoiser sigma");
    san->add_option("--proxy-T", san_cfg.proxy_T, "proxy schedule steps");
    san->add_option("--proxy-beta0", san_cfg.proxy_beta0, "proxy beta start");
    san->add_option("--proxy-beta1", san_cfg.proxy_beta1, "proxy beta end");
    san->add_option("--t", san_cfg.ads_t, "diffusion step for the sanitizer");
    san->add_option("--delta", san_cfg.delta, "direction-normalizer stabilizer");

    CLI::App* dec = app.add_subcommand(
        "decode", "invert a PNG carrier and print the recovered payload");
    std::string dec_in, dec_key, dec_key_hex, dec_codec = "sign", dec_expect;
    int dec_payload = 64, dec_rep = 3, dec_refine = 8;
    double dec_sigma = 0.25, dec_beta0 = 1e-5, dec_beta1 = 1e-4, dec_sigma0 = 0.005;
    int dec_T = 10;
    dec->add_option("--in", dec_in, "carrier PNG")->required();
    dec->add_option("--key", dec_key, "codec key (UTF-8)");
    dec->add_option("--key-hex", dec_key_hex, "codec key as hex bytes");
    dec->add_option("--codec", dec_codec, "sign or stream")
        ->check(CLI::IsMember({"sign", "stream"}));
    dec->add_option("--payload-bits", dec_payload, "declared payload length");
    dec->add_option("--rep", dec_rep, "repetition factor (odd)");
    dec->add_option("--refine", dec_refine, "inversion refinement iterations");
    dec->add_option("--codec-sigma", dec_sigma, "codec denoiser sigma");
    dec->add_option("--codec-T", dec_T, "codec schedule steps");
    dec->add_option("--codec-beta0", dec_beta0, "codec beta start");
    dec->add_option("--codec-beta1", dec_beta1, "codec beta end");
    dec->add_option("--sigma0", dec_sigma0, "stream codec noise scale");
    dec->add_option("--expect-hex", dec_expect,
                    "expected payload hex; prints BER and success");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            gw::ExperimentConfig cfg = resolve_config(gen_opts);
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            gw::run_generate(cfg);
            std::cout << "wrote " << cfg.n_images << " carriers to "
                      << cfg.output_dir << "\n";
        } else if (sweep->parsed()) {
            gw::ExperimentConfig cfg = resolve_config(sweep_opts);
            if (!sweep_out.empty()) cfg.output_dir = sweep_out;
            const gw::SweepResult res = gw::run_sweep(cfg);
            std::cout << "method,params,failure%,mean_ber,mean_ssim\n";
            for (const gw::EvalRecord& r : res.records)
                std::printf("%s,%s,%.2f,%.4f,%.5f\n", r.method.c_str(),
                            r.params.c_str(), r.failure_rate_percent,
                            r.mean_ber, r.mean_ssim);
            std::cout << "full results in " << cfg.output_dir
                      << "/sweep.csv and per_image.csv\n";
        } else if (front->parsed()) {
            gw::run_frontier(front_in, front_svg, front_csv);
            std::cout << "wrote " << front_svg << " and " << front_csv << "\n";
        } else if (san->parsed()) {
            if (!san_key_hex.empty()) san_key = decode_hex_key(san_key_hex);
            const std::vector<gw::MethodSpec> ms = gw::parse_methods(san_method);
            if (ms.size() != 1)
                throw std::invalid_argument("--method expects a single method");
            const bool needs_key =
                ms[0].method == "diff1" || ms[0].method.rfind("ads-", 0) == 0;
            if (needs_key && san_key.empty()) {
                std::cerr << "error: --key (or --key-hex) is required for "
                          << ms[0].method << "\n";
                return 1;
            }
            const gw::ImageTensor in = gw::read_png(san_in);
            const gw::NoiseSchedule proxy_sched = gw::make_schedule(
                san_cfg.proxy_T, san_cfg.proxy_beta0, san_cfg.proxy_beta1);
            const gw::BlurDenoiser proxy_den(san_cfg.proxy_sigma);
            const gw::ImageTensor out = gw::apply_method(
                ms[0], in, san_key, san_cfg, proxy_sched, proxy_den);
            if (san_bits == 16) gw::write_png16(san_out, out);
            else gw::write_png8(san_out, out);
            std::printf("psnr_db=%.4f ssim=%.6f\n", gw::psnr(in, out),
                        gw::ssim(in, out));
        } else if (dec->parsed()) {
            if (!dec_key_hex.empty()) dec_key = decode_hex_key(dec_key_hex);
            const gw::ImageTensor carrier = gw::read_png(dec_in);
            const gw::NoiseSchedule sched =
                gw::make_schedule(dec_T, dec_beta0, dec_beta1);
            const gw::BlurDenoiser den(dec_sigma);
            gw::CodecConfig cc;
            cc.kind = dec_codec == "sign" ? gw::CodecConfig::Kind::Sign
                                          : gw::CodecConfig::Kind::Stream;
            cc.key = dec_key;
            cc.ecc.repetition_factor = dec_rep;
            cc.schedule = &sched;
            cc.denoiser = &den;
            cc.height = carrier.h;
            cc.width = carrier.w;
            cc.payload_len = dec_payload;
            cc.refine_iters = dec_refine;
            cc.sigma0 = dec_sigma0;
            const gw::DecodeResult res = gw::codec_decode(carrier, cc);
            std::cout << "payload_hex=" << gw::bits_to_hex(res.payload.bits)
                      << "\n";
            if (cc.kind == gw::CodecConfig::Kind::Sign) {
                std::printf("worst_residual=%.3e\n", res.worst_residual);
                if (res.worst_residual > 1e-3)
                    std::cerr << "warning: inversion residual above 1e-3; the "
                                 "latent estimate is untrustworthy\n";
            } else if (!res.margins.empty()) {
                std::printf("min_margin=%.6f\n",
                            *std::min_element(res.margins.begin(),
                                              res.margins.end()));
            }
            if (!dec_expect.empty()) {
                const std::vector<uint8_t> want =
                    gw::hex_to_bits(dec_expect, dec_payload);
                const double b = gw::ber(want, res.payload.bits);
                std::printf("ber=%.6f success=%d\n", b,
                            gw::decode_success(b) ? 1 : 0);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
