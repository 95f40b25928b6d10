// SPDX-License-Identifier: Apache-2.0

#include "mixce/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mixce {

namespace {

std::string format_g(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

std::string sampling_name(AoaSampling s) {
  switch (s) {
    case AoaSampling::kGridWithoutReplacement: return "grid-without-replacement";
    case AoaSampling::kGridWithReplacement: return "grid-with-replacement";
    case AoaSampling::kContinuousUniform: return "continuous-uniform";
  }
  throw std::logic_error("unknown sampling mode");
}

AoaSampling sampling_from_name(const std::string& name) {
  if (name == "grid-without-replacement") return AoaSampling::kGridWithoutReplacement;
  if (name == "grid-with-replacement") return AoaSampling::kGridWithReplacement;
  if (name == "continuous-uniform") return AoaSampling::kContinuousUniform;
  throw std::invalid_argument("unknown aoa_sampling '" + name + "'");
}

nlohmann::json bits_to_json(const std::optional<int>& bits) {
  if (!bits) return "inf";
  return *bits;
}

std::optional<int> bits_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::nullopt;
    throw std::invalid_argument("bit depth must be an integer or \"inf\"");
  }
  return j.get<int>();
}

nlohmann::json table_to_json(const std::map<int, double>& table) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [bits, value] : table) j[std::to_string(bits)] = value;
  return j;
}

std::map<int, double> table_from_json(const nlohmann::json& j) {
  std::map<int, double> table;
  for (const auto& [key, value] : j.items()) {
    table[std::stoi(key)] = value.get<double>();
  }
  return table;
}

}  // namespace

std::string pattern_name(AdcPattern pattern) {
  return pattern == AdcPattern::kBlock ? "block" : "random";
}

AdcPattern pattern_from_name(const std::string& name) {
  if (name == "block") return AdcPattern::kBlock;
  if (name == "random") return AdcPattern::kRandom;
  throw std::invalid_argument("unknown ADC pattern '" + name + "'");
}

std::string point_id(const OperatingPoint& point) {
  std::string bits = point.bits_low ? std::to_string(*point.bits_low) : "inf";
  return "snr" + format_g(point.snr_db) + "_eta" + format_g(point.eta) + "_" +
         pattern_name(point.pattern) + "_b" + bits;
}

ExperimentConfig ExperimentConfig::defaults() { return {}; }

void ExperimentConfig::apply_preset(const std::string& name) {
  if (name == "paper") {
    sizes = SizesConfig{90000, 10000, 10000};
    training.epochs = 100;
  } else if (name == "desk") {
    sizes = SizesConfig{20000, 2000, 2000};
    training.epochs = 50;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
}

void ExperimentConfig::validate() const {
  channel.validate();
  quantizer.validate();
  training.validate();
  lmmse.validate();
  if (!(pilot_power > 0.0)) throw std::invalid_argument("pilot_power must be > 0");
  if (!(scale_c > 0.0)) throw std::invalid_argument("scale_c must be > 0");
  if (snr_db.empty()) throw std::invalid_argument("snr_db list must be non-empty");
  if (eta.empty()) throw std::invalid_argument("eta list must be non-empty");
  for (double e : eta) {
    if (e < 0.0 || e > 1.0)
      throw std::invalid_argument("eta values must lie in [0, 1]");
  }
  if (sizes.train < 1 || sizes.val < 0 || sizes.test < 1)
    throw std::invalid_argument("dataset sizes must be positive (validation may be 0)");
  if (methods.empty()) throw std::invalid_argument("methods list must be non-empty");
  static const std::set<std::string> known = {"ls", "lmmse", "di", "sip"};
  for (const std::string& m : methods) {
    if (!known.count(m)) throw std::invalid_argument("unknown method '" + m + "'");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  nlohmann::json ch;
  ch["antennas"] = channel.antenna_count;
  ch["paths"] = channel.path_count;
  ch["path_power"] = channel.path_power;
  ch["spacing_wavelengths"] = channel.spacing_wavelengths;
  if (channel.aoa_grid ==
      default_aoa_grid(static_cast<int>(channel.aoa_grid.size()))) {
    ch["aoa_grid_points"] = channel.aoa_grid.size();
  } else {
    ch["aoa_grid"] = channel.aoa_grid;
  }
  ch["aoa_sampling"] = sampling_name(channel.aoa_sampling);
  j["channel"] = ch;
  j["test_aoa_shift"] = test_aoa_shift;
  j["pilot_power"] = pilot_power;
  j["snr_db"] = snr_db;
  j["eta"] = eta;
  j["pattern"] = pattern_name(pattern);
  j["quantizer"] = {{"bits_high", bits_to_json(quantizer.bits_high)},
                    {"bits_low", bits_to_json(quantizer.bits_low)},
                    {"clip_scale", table_to_json(quantizer.clip_scale)}};
  j["sizes"] = {{"train", sizes.train}, {"val", sizes.val}, {"test", sizes.test}};
  j["training"] = {{"epochs", training.epochs},
                   {"learning_rate", training.learning_rate},
                   {"batch_size", training.batch_size},
                   {"adam_beta1", training.adam_beta1},
                   {"adam_beta2", training.adam_beta2},
                   {"adam_epsilon", training.adam_epsilon}};
  j["lmmse"] = {{"mode", lmmse.mode == LmmseMode::kStandard ? "standard"
                                                            : "paper-literal"},
                {"alpha_table", table_to_json(lmmse.alpha_table)},
                {"alpha_highres", lmmse.alpha_highres}};
  j["scale_c"] = scale_c;
  j["methods"] = methods;
  j["seed"] = master_seed;
  j["out_dir"] = out_dir;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("channel")) {
    const nlohmann::json& ch = j.at("channel");
    if (ch.contains("antennas")) cfg.channel.antenna_count = ch.at("antennas");
    if (ch.contains("paths")) cfg.channel.path_count = ch.at("paths");
    if (ch.contains("path_power")) cfg.channel.path_power = ch.at("path_power");
    if (ch.contains("spacing_wavelengths"))
      cfg.channel.spacing_wavelengths = ch.at("spacing_wavelengths");
    if (ch.contains("aoa_grid")) {
      cfg.channel.aoa_grid = ch.at("aoa_grid").get<std::vector<double>>();
    } else if (ch.contains("aoa_grid_points")) {
      cfg.channel.aoa_grid = default_aoa_grid(ch.at("aoa_grid_points"));
    }
    if (ch.contains("aoa_sampling"))
      cfg.channel.aoa_sampling = sampling_from_name(ch.at("aoa_sampling"));
  }
  if (j.contains("test_aoa_shift")) cfg.test_aoa_shift = j.at("test_aoa_shift");
  if (j.contains("pilot_power")) cfg.pilot_power = j.at("pilot_power");
  if (j.contains("snr_db")) cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
  if (j.contains("eta")) cfg.eta = j.at("eta").get<std::vector<double>>();
  if (j.contains("pattern")) cfg.pattern = pattern_from_name(j.at("pattern"));
  if (j.contains("quantizer")) {
    const nlohmann::json& q = j.at("quantizer");
    if (q.contains("bits_high")) cfg.quantizer.bits_high = bits_from_json(q.at("bits_high"));
    if (q.contains("bits_low")) cfg.quantizer.bits_low = bits_from_json(q.at("bits_low"));
    if (q.contains("clip_scale")) cfg.quantizer.clip_scale = table_from_json(q.at("clip_scale"));
  }
  if (j.contains("sizes")) {
    const nlohmann::json& s = j.at("sizes");
    if (s.contains("train")) cfg.sizes.train = s.at("train");
    if (s.contains("val")) cfg.sizes.val = s.at("val");
    if (s.contains("test")) cfg.sizes.test = s.at("test");
  }
  if (j.contains("training")) {
    const nlohmann::json& t = j.at("training");
    if (t.contains("epochs")) cfg.training.epochs = t.at("epochs");
    if (t.contains("learning_rate")) cfg.training.learning_rate = t.at("learning_rate");
    if (t.contains("batch_size")) cfg.training.batch_size = t.at("batch_size");
    if (t.contains("adam_beta1")) cfg.training.adam_beta1 = t.at("adam_beta1");
    if (t.contains("adam_beta2")) cfg.training.adam_beta2 = t.at("adam_beta2");
    if (t.contains("adam_epsilon")) cfg.training.adam_epsilon = t.at("adam_epsilon");
  }
  if (j.contains("lmmse")) {
    const nlohmann::json& l = j.at("lmmse");
    if (l.contains("mode")) {
      std::string mode = l.at("mode");
      if (mode == "standard") cfg.lmmse.mode = LmmseMode::kStandard;
      else if (mode == "paper-literal") cfg.lmmse.mode = LmmseMode::kPaperLiteral;
      else throw std::invalid_argument("unknown lmmse mode '" + mode + "'");
    }
    if (l.contains("alpha_table")) cfg.lmmse.alpha_table = table_from_json(l.at("alpha_table"));
    if (l.contains("alpha_highres")) cfg.lmmse.alpha_highres = l.at("alpha_highres");
  }
  if (j.contains("scale_c")) cfg.scale_c = j.at("scale_c");
  if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("seed")) cfg.master_seed = j.at("seed");
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir");
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

void ExperimentConfig::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path.string());
  out << to_json().dump(2) << "\n";
}

std::uint64_t ExperimentConfig::config_hash() const {
  return fnv1a64(to_json().dump());
}

ChannelModelConfig ExperimentConfig::test_channel() const {
  ChannelModelConfig test = channel;
  for (double& phi : test.aoa_grid) phi += test_aoa_shift;
  return test;
}

std::vector<OperatingPoint> ExperimentConfig::enumerate_points() const {
  std::vector<OperatingPoint> points;
  for (double snr : snr_db) {
    for (double e : eta) {
      OperatingPoint p;
      p.snr_db = snr;
      p.eta = e;
      p.pattern = pattern;
      p.bits_low = quantizer.bits_low;
      points.push_back(p);
    }
  }
  return points;
}

std::uint64_t ExperimentConfig::point_seed(const OperatingPoint& point,
                                           const std::string& purpose) const {
  return derive_seed(master_seed, purpose + ":" + point_id(point));
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.to_json() == b.to_json();
}

}  // namespace mixce
