#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "prolatoscope/metrics.hpp"

namespace prolatoscope {
namespace cli {

// ---------------------------------------------------------------------------
// run configuration
//
// Defaults reproduce the reference scenario: unit bandwidth, the double-peak
// object at half the core with width 0.1, 10^12 photons, and an e^r = 10
// squeezer when the squeezed model is chosen.
// ---------------------------------------------------------------------------

struct RunConfig {
  double c = 1.0;
  int modes = 18;
  int precision_bits = 256;
  std::string object = "double-gaussian";
  double s0 = 0.5;
  double sigma = 0.1;
  double eps = 1e-2;
  double photons = 1e12;
  std::vector<int> L = {7};
  std::string model = "coherent";
  double r = 2.302585092994046;
  int trials = 5;
  std::uint64_t seed = 1;
  std::string out_dir = "prolatoscope-out";
  std::vector<std::string> formats = {"csv", "json"};
  std::string cache_dir = "prolatoscope-cache";
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_num(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw config_error("option " + key + ": cannot parse number '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw config_error("option " + key + ": cannot parse integer '" + v + "'");
  return out;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw config_error("option " + key + ": cannot parse unsigned integer '" + v + "'");
  return out;
}

inline std::vector<int> parse_mode_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& tok : split(v, ','))
    if (!trim(tok).empty()) out.push_back(parse_int(key, trim(tok)));
  if (out.empty()) throw config_error("option " + key + ": empty mode list");
  return out;
}

inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "c")
    cfg.c = parse_num(key, value);
  else if (key == "modes")
    cfg.modes = parse_int(key, value);
  else if (key == "precision-bits")
    cfg.precision_bits = parse_int(key, value);
  else if (key == "object")
    cfg.object = value;
  else if (key == "s0")
    cfg.s0 = parse_num(key, value);
  else if (key == "sigma")
    cfg.sigma = parse_num(key, value);
  else if (key == "eps")
    cfg.eps = parse_num(key, value);
  else if (key == "photons")
    cfg.photons = parse_num(key, value);
  else if (key == "L")
    cfg.L = parse_mode_list(key, value);
  else if (key == "model")
    cfg.model = value;
  else if (key == "r")
    cfg.r = parse_num(key, value);
  else if (key == "trials")
    cfg.trials = parse_int(key, value);
  else if (key == "seed")
    cfg.seed = parse_u64(key, value);
  else if (key == "out-dir")
    cfg.out_dir = value;
  else if (key == "formats")
    cfg.formats = split(value, ',');
  else
    throw config_error("unknown option '" + key + "'");
}

// Flat JSON object with string/number values; key order preserved, duplicate
// and nested constructs rejected.
inline std::vector<std::pair<std::string, std::string>> parse_flat_json(const std::string& text,
                                                                        const std::string& path) {
  auto fail = [&path](const std::string& why) {
    throw config_error("config file " + path + ": " + why);
  };
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto read_string = [&]() -> std::string {
    ++i;  // opening quote
    std::string s;
    while (i < n && text[i] != '"') {
      if (text[i] == '\\') fail("escape sequences are not supported");
      s += text[i++];
    }
    if (i >= n) fail("unterminated string");
    ++i;
    return s;
  };
  skip_ws();
  if (i >= n || text[i] != '{') fail("expected a flat JSON object");
  ++i;
  skip_ws();
  if (i < n && text[i] == '}') {
    ++i;
  } else {
    while (true) {
      skip_ws();
      if (i >= n || text[i] != '"') fail("expected a quoted key");
      const std::string key = read_string();
      skip_ws();
      if (i >= n || text[i] != ':') fail("expected ':' after key '" + key + "'");
      ++i;
      skip_ws();
      std::string value;
      if (i < n && text[i] == '"') {
        value = read_string();
      } else {
        while (i < n && text[i] != ',' && text[i] != '}') value += text[i++];
        value = trim(value);
        if (value.empty() || value.front() == '{' || value.front() == '[')
          fail("value for '" + key + "' must be a scalar");
      }
      for (const auto& kv : out)
        if (kv.first == key) fail("duplicate key '" + key + "'");
      out.emplace_back(key, value);
      skip_ws();
      if (i < n && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < n && text[i] == '}') {
        ++i;
        break;
      }
      fail("expected ',' or '}'");
    }
  }
  skip_ws();
  if (i != n) fail("trailing content after the object");
  return out;
}

inline bool has_format(const RunConfig& cfg, const std::string& fmt) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), fmt) != cfg.formats.end();
}

inline void validate(const RunConfig& cfg) {
  if (cfg.object != "double-gaussian" && cfg.object != "rect")
    throw config_error("object must be 'double-gaussian' or 'rect', got '" + cfg.object + "'");
  if (cfg.model != "coherent" && cfg.model != "squeezed")
    throw config_error("model must be 'coherent' or 'squeezed', got '" + cfg.model + "'");
  for (const std::string& f : cfg.formats)
    if (f != "csv" && f != "json" && f != "svg")
      throw config_error("unknown output format '" + f + "'");
  if (!(cfg.c > 0.0)) throw config_error("c must be positive");
  if (cfg.modes < 1) throw config_error("modes must be at least 1");
  if (cfg.trials < 1) throw config_error("trials must be at least 1");
  if (cfg.L.empty()) throw config_error("mode list L must not be empty");
  for (int l : cfg.L)
    if (l < 1) throw config_error("every L must be at least 1");
  if (cfg.out_dir.empty()) throw config_error("out-dir must not be empty");
}

}  // namespace detail

inline RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  std::vector<std::pair<std::string, std::string>> kv;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string a = args[i];
    if (a.rfind("--", 0) != 0) throw config_error("unexpected argument '" + a + "'");
    a = a.substr(2);
    std::string value;
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      value = a.substr(eq + 1);
      a = a.substr(0, eq);
    } else {
      if (++i >= args.size()) throw config_error("option '--" + a + "' needs a value");
      value = args[i];
    }
    kv.emplace_back(a, value);
  }
  // config file first, then flags override in order
  for (const auto& [k, v] : kv)
    if (k == "config") {
      if (!file_exists(v)) throw config_error("config file " + v + " not found");
      for (const auto& [jk, jv] : detail::parse_flat_json(read_text_file(v), v))
        detail::apply_key(cfg, jk, jv);
    }
  for (const auto& [k, v] : kv)
    if (k != "config") detail::apply_key(cfg, k, v);
  if (const char* env = std::getenv("PROLATOSCOPE_CACHE"); env && *env) cfg.cache_dir = env;
  detail::validate(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// artifacts: cache path, manifest, output helpers
// ---------------------------------------------------------------------------

inline std::string basis_cache_path(const RunConfig& cfg) {
  return cfg.cache_dir + "/basis-c" + format_double(cfg.c) + "-K" + std::to_string(cfg.modes) +
         "-p" + std::to_string(cfg.precision_bits) + ".basis";
}

inline ProlateBasis require_basis(const RunConfig& cfg) {
  const std::string path = basis_cache_path(cfg);
  if (!file_exists(path))
    throw missing_artifact_error("basis cache " + path +
                                 " not found; run the basis command first");
  return load_basis(path);
}

namespace detail {

inline std::string join_mode_list(const std::vector<int>& l) {
  std::string s;
  for (std::size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
  return s;
}

inline std::string join_formats(const std::vector<std::string>& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + f[i];
  return s;
}

inline std::string quote(const std::string& s) { return "\"" + s + "\""; }

inline std::string timestamp_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// The manifest echoes the fully resolved configuration; the timestamp is the
// only line that differs between reruns of an identical config.
inline void write_manifest(const RunConfig& cfg, const std::string& command,
                           const std::vector<std::pair<std::string, std::string>>& extra) {
  std::vector<std::pair<std::string, std::string>> fields;
  fields.emplace_back("command", quote(command));
  fields.emplace_back("timestamp", quote(timestamp_utc()));
  fields.emplace_back("c", format_double(cfg.c));
  fields.emplace_back("modes", std::to_string(cfg.modes));
  fields.emplace_back("precision-bits", std::to_string(cfg.precision_bits));
  fields.emplace_back("object", quote(cfg.object));
  fields.emplace_back("s0", format_double(cfg.s0));
  fields.emplace_back("sigma", format_double(cfg.sigma));
  fields.emplace_back("eps", format_double(cfg.eps));
  fields.emplace_back("photons", format_double(cfg.photons));
  fields.emplace_back("L", quote(join_mode_list(cfg.L)));
  fields.emplace_back("model", quote(cfg.model));
  fields.emplace_back("r", format_double(cfg.r));
  fields.emplace_back("trials", std::to_string(cfg.trials));
  fields.emplace_back("seed", std::to_string(cfg.seed));
  fields.emplace_back("out-dir", quote(cfg.out_dir));
  fields.emplace_back("formats", quote(join_formats(cfg.formats)));
  fields.emplace_back("cache-dir", quote(cfg.cache_dir));
  for (const auto& kv : extra) fields.push_back(kv);
  std::ostringstream out;
  out << "{\n";
  for (std::size_t i = 0; i < fields.size(); ++i)
    out << "  \"" << fields[i].first << "\": " << fields[i].second
        << (i + 1 < fields.size() ? "," : "") << "\n";
  out << "}\n";
  write_text_file(cfg.out_dir + "/manifest.json", out.str());
}

inline void write_output(const RunConfig& cfg, const std::string& name,
                         const std::string& content) {
  const std::string path = cfg.out_dir + "/" + name;
  write_text_file(path, content);
  std::cout << "wrote " << path << "\n";
}

inline ObjectField make_object(const RunConfig& cfg) {
  if (cfg.object == "rect") return make_rect_source(cfg.photons, cfg.eps);
  return make_double_gaussian(cfg.photons, cfg.s0, cfg.sigma);
}

inline NoiseModel make_model(const RunConfig& cfg) {
  if (cfg.model == "squeezed") return make_squeezed(cfg.r);
  return make_coherent();
}

inline void require_L_in_basis(int L, const RunConfig& cfg) {
  if (L > cfg.modes)
    throw config_error("L=" + std::to_string(L) + " exceeds the basis size K=" +
                       std::to_string(cfg.modes));
}

// two-column CSV for real-valued PSF profiles, same comment convention as the
// complex field profiles
inline std::string psf_csv(const std::string& meaning, const PsfProfile& p, double c, int L) {
  std::ostringstream out;
  out << "# " << meaning << "," << format_double(c) << "," << L << "\n";
  out << "coordinate,value\n";
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    out << format_double(p.grid[i]) << "," << format_double(p.values[i]) << "\n";
  return out.str();
}

inline std::vector<double> real_part(const FieldProfile& p) {
  std::vector<double> out(p.values.size());
  for (std::size_t i = 0; i < p.values.size(); ++i) out[i] = p.values[i].real();
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

inline int cmd_basis(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.cache_dir);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = basis_cache_path(cfg);
  bool cache_hit = false;
  ProlateBasis basis = [&] {
    if (file_exists(path)) {
      try {
        ProlateBasis b = load_basis(path);
        cache_hit = true;
        return b;
      } catch (const std::exception& e) {
        std::cerr << "stale cache " << path << " (" << e.what() << "), rebuilding\n";
      }
    }
    ProlateBasis b = build_basis({cfg.c, cfg.modes, cfg.precision_bits});
    save_basis(b, path);
    return b;
  }();
  std::cout << (cache_hit ? "cache hit: " : "built: ") << path << "\n";
  std::cout << "mode  lambda\n";
  for (int n = 0; n < basis.num_modes(); ++n)
    std::printf("%4d  %s\n", n, basis.mode(n).lambda.str().c_str());
  detail::write_manifest(cfg, "basis",
                         {{"cache-hit", cache_hit ? "true" : "false"},
                          {"basis-file", detail::quote(path)},
                          {"basis-checksum", detail::quote(basis_checksum(basis))}});
  return 0;
}

inline int cmd_forward(const RunConfig& cfg) {
  const ProlateBasis basis = require_basis(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const ObjectField object = detail::make_object(cfg);
  const CoeffVector coeffs = project_coeffs(object, basis, cfg.modes);

  const FieldProfile a = object_profile(object, default_core_grid());
  const FieldProfile f = forward_spectrum(coeffs, basis, default_spectrum_grid());
  const FieldProfile e = forward_image(object, cfg.c, default_space_grid());

  if (detail::has_format(cfg, "csv")) {
    detail::write_output(cfg, "object.csv", export_profile_csv(a, cfg.c, cfg.modes));
    detail::write_output(cfg, "spectrum.csv", export_profile_csv(f, cfg.c, cfg.modes));
    detail::write_output(cfg, "image.csv", export_profile_csv(e, cfg.c, cfg.modes));
  }
  if (detail::has_format(cfg, "svg")) {
    detail::write_output(
        cfg, "image.svg",
        render_svg_polylines("object and diffraction-limited image",
                             {{"object a(s)", a.grid, detail::real_part(a)},
                              {"image e(s)", e.grid, detail::real_part(e)}}));
    detail::write_output(cfg, "spectrum.svg",
                         render_svg_polylines("angular spectrum f(xi)",
                                              {{"Re f", f.grid, detail::real_part(f)}}));
  }

  const double sep = feature_scale(object);
  std::cout << "feature scale " << format_double(sep) << " vs Rayleigh distance "
            << format_double(rayleigh_distance(cfg.c)) << " -> "
            << (beyond_rayleigh(object, cfg.c) ? "beyond" : "within")
            << " the classical limit\n";
  detail::write_manifest(cfg, "forward",
                         {{"pupil-passband", detail::quote("|xi| <= 1")},
                          {"basis-checksum", detail::quote(basis_checksum(basis))}});
  return 0;
}

inline int cmd_reconstruct(const RunConfig& cfg) {
  const ProlateBasis basis = require_basis(cfg);
  for (int l : cfg.L) detail::require_L_in_basis(l, cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const ObjectField object = detail::make_object(cfg);
  const CoeffVector coeffs = project_coeffs(object, basis, cfg.modes);

  const std::vector<double> dev_grid = make_uniform_grid(-8.0, 8.0, 0.5);
  const FieldProfile exact_dev = forward_spectrum(coeffs, basis, dev_grid);
  std::vector<FieldProfile> recon_dev;

  for (int l : cfg.L) {
    const FieldProfile ro = reconstruct_object(coeffs, basis, l, default_core_grid());
    const FieldProfile rs = reconstruct_spectrum(coeffs, basis, l, default_spectrum_grid());
    if (detail::has_format(cfg, "csv")) {
      detail::write_output(cfg, "recon-object-L" + std::to_string(l) + ".csv",
                           export_profile_csv(ro, cfg.c, l));
      detail::write_output(cfg, "recon-spectrum-L" + std::to_string(l) + ".csv",
                           export_profile_csv(rs, cfg.c, l));
    }
    recon_dev.push_back(reconstruct_spectrum(coeffs, basis, l, dev_grid));
    const double rms = rms_deviation(exact_dev, recon_dev.back(), 8.0);
    const double window = closeness_window(exact_dev, recon_dev.back(), 0.05);
    std::cout << "L=" << l << "  rel-rms(|xi|<=8)=" << format_double(rms, 6)
              << "  closeness-window=" << format_double(window, 6) << "\n";
  }

  if (detail::has_format(cfg, "csv")) {
    std::ostringstream dev;
    dev << "xi,exact_re,exact_im";
    for (int l : cfg.L) dev << ",dev_L" << l;
    dev << "\n";
    for (std::size_t i = 0; i < dev_grid.size(); ++i) {
      dev << format_double(dev_grid[i]) << "," << format_double(exact_dev.values[i].real())
          << "," << format_double(exact_dev.values[i].imag());
      for (const FieldProfile& rp : recon_dev)
        dev << "," << format_double(std::abs(rp.values[i] - exact_dev.values[i]));
      dev << "\n";
    }
    detail::write_output(cfg, "deviation.csv", dev.str());
  }
  if (detail::has_format(cfg, "svg")) {
    const FieldProfile exact_fine =
        forward_spectrum(coeffs, basis, default_spectrum_grid());
    std::vector<SvgSeries> series = {
        {"exact", exact_fine.grid, detail::real_part(exact_fine)}};
    for (std::size_t j = 0; j < cfg.L.size(); ++j) {
      const FieldProfile rs =
          reconstruct_spectrum(coeffs, basis, cfg.L[j], default_spectrum_grid());
      series.push_back({"L=" + std::to_string(cfg.L[j]), rs.grid, detail::real_part(rs)});
    }
    detail::write_output(cfg, "reconstruct.svg",
                         render_svg_polylines("reconstructed spectra", series));
  }
  detail::write_manifest(cfg, "reconstruct",
                         {{"basis-checksum", detail::quote(basis_checksum(basis))}});
  return 0;
}

inline int cmd_montecarlo(const RunConfig& cfg) {
  const ProlateBasis basis = require_basis(cfg);
  const int L = cfg.L.front();
  detail::require_L_in_basis(L, cfg);
  std::filesystem::create_directories(cfg.out_dir);
  const ObjectField object = detail::make_object(cfg);
  const NoiseModel model = detail::make_model(cfg);
  const Ensemble ens = run_ensemble(object, basis, L, model, cfg.trials, cfg.seed);

  const std::vector<double> grid = make_uniform_grid(-8.0, 8.0, 0.1);
  const FieldProfile exact = realization_spectrum(ens.noise_free, basis, grid);
  std::vector<std::vector<double>> spectra;
  for (const CoeffVector& trial : ens.realizations)
    spectra.push_back(detail::real_part(realization_spectrum(trial, basis, grid)));

  std::vector<double> mean(grid.size(), 0.0), dev(grid.size(), 0.0);
  for (const auto& g : spectra)
    for (std::size_t i = 0; i < grid.size(); ++i) mean[i] += g[i];
  for (double& m : mean) m /= cfg.trials;
  for (const auto& g : spectra)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = g[i] - exact.values[i].real();
      dev[i] += d * d;
    }
  for (double& d : dev) d = std::sqrt(d / cfg.trials);

  // per-trial columns are capped to keep large-T runs usable
  const int shown = std::min(cfg.trials, 64);
  if (detail::has_format(cfg, "csv")) {
    std::ostringstream rl;
    rl << "xi,exact,mean";
    for (int t = 0; t < shown; ++t) rl << ",trial" << t;
    rl << "\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rl << format_double(grid[i]) << "," << format_double(exact.values[i].real()) << ","
         << format_double(mean[i]);
      for (int t = 0; t < shown; ++t) rl << "," << format_double(spectra[std::size_t(t)][i]);
      rl << "\n";
    }
    detail::write_output(cfg, "realizations.csv", rl.str());

    std::ostringstream dv;
    dv << "xi,exact,deviation\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      dv << format_double(grid[i]) << "," << format_double(exact.values[i].real()) << ","
         << format_double(dev[i]) << "\n";
    detail::write_output(cfg, "deviation.csv", dv.str());
    detail::write_output(cfg, "ensemble.csv", export_ensemble_csv(ens));
  }
  if (detail::has_format(cfg, "json"))
    detail::write_output(cfg, "ensemble.json", ensemble_summary_json(ens));
  if (detail::has_format(cfg, "svg")) {
    std::vector<SvgSeries> series = {{"noise-free", grid, detail::real_part(exact)},
                                     {"mean", grid, mean}};
    for (int t = 0; t < std::min(cfg.trials, 5); ++t)
      series.push_back({"trial " + std::to_string(t), grid, spectra[std::size_t(t)]});
    detail::write_output(cfg, "realizations.svg",
                         render_svg_polylines("spectrum realizations", series));
  }
  std::cout << "ensemble: " << cfg.trials << " trials, L=" << L << ", model=" << cfg.model
            << ", seed=" << cfg.seed << "\n";
  detail::write_manifest(cfg, "montecarlo",
                         {{"realization-columns", std::to_string(shown)},
                          {"basis-checksum", detail::quote(basis_checksum(basis))}});
  return 0;
}

inline int cmd_psf(const RunConfig& cfg) {
  const ProlateBasis basis = require_basis(cfg);
  const int L = cfg.L.front();
  detail::require_L_in_basis(L, cfg);
  std::filesystem::create_directories(cfg.out_dir);

  const PsfProfile imaging = imaging_psf(cfg.c, default_psf_grid(cfg.c));
  const PsfProfile recon = reconstruction_psf(basis, L, default_core_grid());
  const SuperresReport rep = superres_factor(cfg.c, basis, L);

  if (detail::has_format(cfg, "csv")) {
    detail::write_output(cfg, "imaging-psf.csv",
                         detail::psf_csv("imaging-psf", imaging, cfg.c, L));
    detail::write_output(cfg, "reconstruction-psf.csv",
                         detail::psf_csv("reconstruction-psf", recon, cfg.c, L));
  }
  if (detail::has_format(cfg, "json")) {
    std::ostringstream js;
    js << "{\n";
    js << "  \"W\": " << format_double(rep.W) << ",\n";
    js << "  \"W-L\": " << format_double(rep.W_L) << ",\n";
    js << "  \"S\": " << format_double(rep.S) << ",\n";
    js << "  \"core-edge\": " << (rep.core_edge ? "true" : "false") << "\n";
    js << "}\n";
    detail::write_output(cfg, "psf.json", js.str());
  }
  if (detail::has_format(cfg, "svg"))
    detail::write_output(cfg, "psf.svg",
                         render_svg_polylines("point-spread functions",
                                              {{"imaging", imaging.grid, imaging.values},
                                               {"reconstruction L=" + std::to_string(L),
                                                recon.grid, recon.values}}));
  std::cout << "W=" << format_double(rep.W, 6) << "  W_L=" << format_double(rep.W_L, 6)
            << "  S=" << format_double(rep.S, 6) << "\n";
  detail::write_manifest(cfg, "psf",
                         {{"basis-checksum", detail::quote(basis_checksum(basis))}});
  return 0;
}

inline int cmd_sweep(const RunConfig& cfg) {
  const ProlateBasis basis = require_basis(cfg);
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<double> photon_list;
  for (int p = 3; p <= 15; ++p) photon_list.push_back(std::pow(10.0, p));
  const std::vector<NoiseModel> models = {make_coherent(), make_squeezed(cfg.r)};
  const std::vector<SweepPoint> pts = sweep_S_vs_N(photon_list, models, basis, cfg.eps);

  if (detail::has_format(cfg, "csv"))
    detail::write_output(cfg, "sweep.csv", export_sweep_csv(pts));
  if (detail::has_format(cfg, "json"))
    detail::write_output(cfg, "sweep.json", sweep_summary_json(pts, basis, cfg.eps));
  if (detail::has_format(cfg, "svg")) {
    std::vector<SvgSeries> series(2);
    series[0].label = "coherent";
    series[1].label = "squeezed";
    for (const SweepPoint& p : pts) {
      SvgSeries& s = series[p.model.kind == NoiseKind::coherent ? 0 : 1];
      s.x.push_back(std::log10(p.photons));
      s.y.push_back(p.S);
    }
    detail::write_output(cfg, "sweep.svg",
                         render_svg_polylines("super-resolution factor vs log10 N", series));
  }
  for (const SweepPoint& p : pts)
    std::cout << "N=" << format_double(p.photons, 6) << "  " << noise_kind_name(p.model.kind)
              << "  L*=" << p.L_star << "  S=" << format_double(p.S, 6) << "\n";
  detail::write_manifest(cfg, "sweep",
                         {{"basis-checksum", detail::quote(basis_checksum(basis))}});
  return 0;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline void usage(std::ostream& os) {
  os << "usage: prolatoscope <command> [options]\n"
        "\n"
        "commands:\n"
        "  basis        build (or load) the prolate basis and print its eigenvalues\n"
        "  forward      object, band-limited spectrum, and diffraction image profiles\n"
        "  reconstruct  noise-free truncated-basis reconstructions for each L\n"
        "  montecarlo   quantum-noise ensemble of reconstructed spectra\n"
        "  psf          imaging and reconstruction point-spread functions\n"
        "  sweep        super-resolution factor versus photon number\n"
        "\n"
        "options:\n"
        "  --c X              bandwidth parameter (default 1)\n"
        "  --modes K          basis size (default 18)\n"
        "  --precision-bits B eigensolver working precision (default 256)\n"
        "  --object KIND      double-gaussian | rect (default double-gaussian)\n"
        "  --s0 X             gaussian peak position (default 0.5)\n"
        "  --sigma X          gaussian peak width (default 0.1)\n"
        "  --eps X            rect source width (default 0.01)\n"
        "  --photons N        mean photon number (default 1e12)\n"
        "  --L LIST           retained mode counts, comma separated (default 7)\n"
        "  --model KIND       coherent | squeezed (default coherent)\n"
        "  --r X              squeezing parameter (default ln 10)\n"
        "  --trials T         ensemble size (default 5)\n"
        "  --seed S           ensemble seed (default 1)\n"
        "  --out-dir DIR      output directory (default prolatoscope-out)\n"
        "  --formats LIST     csv,json,svg subset (default csv,json)\n"
        "  --config FILE      flat JSON config; flags override\n"
        "\n"
        "environment:\n"
        "  PROLATOSCOPE_CACHE basis cache directory (default prolatoscope-cache)\n";
}

inline int cli_main(int argc, char** argv) {
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
      usage(std::cerr);
      return 2;
    }
    if (args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
      usage(std::cout);
      return 0;
    }
    const std::string command = args[0];
    const RunConfig cfg = parse_config({args.begin() + 1, args.end()});
    if (command == "basis") return cmd_basis(cfg);
    if (command == "forward") return cmd_forward(cfg);
    if (command == "reconstruct") return cmd_reconstruct(cfg);
    if (command == "montecarlo") return cmd_montecarlo(cfg);
    if (command == "psf") return cmd_psf(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    std::cerr << "error: unknown command '" << command << "'\n";
    usage(std::cerr);
    return 2;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const missing_artifact_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cli
}  // namespace prolatoscope
