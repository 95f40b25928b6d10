// SPDX-License-Identifier: Apache-2.0

#include "mixce/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "mixce/dataset_io.hpp"
#include "mixce/report.hpp"

namespace mixce {

namespace {

namespace fs = std::filesystem;

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_g17(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

fs::path point_dir(const ExperimentConfig& cfg, const OperatingPoint& point) {
  return fs::path(cfg.out_dir) / "points" / point_id(point);
}

const std::vector<std::string>& seed_purposes() {
  static const std::vector<std::string> purposes = {
      "partition", "data/train", "data/val",  "data/test", "init/di",
      "shuffle/di", "init/r",     "shuffle/r", "init/mp",   "shuffle/mp"};
  return purposes;
}

void write_point_manifest(const ExperimentConfig& cfg,
                          const OperatingPoint& point, const fs::path& dir) {
  nlohmann::json j;
  j["point"] = point_id(point);
  j["config_hash"] = hash_hex(cfg.config_hash());
  j["created"] = timestamp_utc();
  nlohmann::json seeds;
  for (const std::string& purpose : seed_purposes()) {
    seeds[purpose] = cfg.point_seed(point, purpose);
  }
  j["seeds"] = seeds;
  j["sizes"] = {{"train", cfg.sizes.train},
                {"val", cfg.sizes.val},
                {"test", cfg.sizes.test}};
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << "\n";
}

bool point_manifest_matches(const ExperimentConfig& cfg,
                            const OperatingPoint& point, const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) return false;
  try {
    nlohmann::json j;
    in >> j;
    return j.at("config_hash").get<std::string>() ==
           hash_hex(cfg.config_hash());
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

void write_root_metadata(const ExperimentConfig& cfg) {
  fs::create_directories(fs::path(cfg.out_dir) / "points");
  cfg.save_file(fs::path(cfg.out_dir) / "config.json");
  nlohmann::json j;
  j["config_hash"] = hash_hex(cfg.config_hash());
  j["seed"] = cfg.master_seed;
  j["created"] = timestamp_utc();
  j["tool"] = "mixce 0.1.0";
  std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
  out << j.dump(2) << "\n";
}

void write_trace_csv(const fs::path& path, const std::vector<EpochStats>& trace) {
  std::ofstream out(path);
  out << "epoch,train_mse,val_mse\n";
  for (const EpochStats& row : trace) {
    out << row.epoch << "," << format_g17(row.train_mse) << ","
        << format_g17(row.val_mse) << "\n";
  }
}

void write_train_meta(const fs::path& dir, const TrainedNets& nets) {
  nlohmann::json j;
  if (nets.di) {
    j["di"] = {{"total", nets.di_stats.total},
               {"rejected", nets.di_stats.rejected}};
  }
  if (nets.sip) {
    j["sip"] = {{"total", nets.sip_stats.total},
                {"rejected", nets.sip_stats.rejected}};
  }
  std::ofstream out(dir / "train_meta.json");
  out << j.dump(2) << "\n";
}

void persist_nets(const fs::path& dir, const TrainedNets& nets) {
  if (nets.di) {
    save_checkpoint(*nets.di->di_model, dir / "di.ckpt");
    save_bundle(dir, *nets.di, "di");
    write_trace_csv(dir / "trace_di.csv", nets.di_trace);
  }
  if (nets.sip) {
    save_checkpoint(*nets.sip->r_model, dir / "r.ckpt");
    if (nets.sip->mp_model) save_checkpoint(*nets.sip->mp_model, dir / "mp.ckpt");
    save_bundle(dir, *nets.sip, "sip");
    write_trace_csv(dir / "trace_r.csv", nets.r_trace);
    if (nets.sip->mp_model) write_trace_csv(dir / "trace_mp.csv", nets.mp_trace);
  }
  write_train_meta(dir, nets);
}

void fill_model_paths(std::vector<NmseReport>& reports,
                      const OperatingPoint& point) {
  for (NmseReport& report : reports) {
    if (report.point.method == "di" || report.point.method == "sip") {
      report.model_path = (fs::path("points") / point_id(point) /
                           (report.point.method + ".json"))
                              .generic_string();
    }
  }
}

struct PointStatus {
  std::string id;
  std::string status;  // computed | skipped | failed
  std::string detail;
};

// Runs `work` over the points with a fixed-size worker pool; statuses keep
// input order regardless of scheduling.
std::vector<PointStatus> for_each_point(
    const std::vector<OperatingPoint>& points, int workers,
    const std::function<PointStatus(const OperatingPoint&)>& work) {
  std::vector<PointStatus> statuses(points.size());
  std::atomic<std::size_t> next{0};
  auto run = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= points.size()) break;
      statuses[i] = work(points[i]);
    }
  };
  int n_threads = std::min<int>(workers, static_cast<int>(points.size()));
  if (n_threads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }
  return statuses;
}

int print_summary(const std::vector<PointStatus>& statuses) {
  bool failed = false;
  for (const PointStatus& s : statuses) {
    std::cout << s.id << ": " << s.status;
    if (!s.detail.empty()) std::cout << " (" << s.detail << ")";
    std::cout << "\n";
    if (s.status == "failed") failed = true;
  }
  return failed ? 1 : 0;
}

struct PointData {
  AntennaPartition partition;
  SampleSet train, val, test;
};

PointData make_point_data(const ExperimentConfig& cfg,
                          const OperatingPoint& point) {
  PointData data;
  data.partition = make_partition(cfg.channel.antenna_count, point.eta,
                                  point.pattern,
                                  cfg.point_seed(point, "partition"));
  PilotConfig pilot = PilotConfig::from_snr_db(
      point.snr_db, cfg.channel.path_power, cfg.pilot_power);
  QuantizerSpec quantizer = cfg.quantizer;
  quantizer.bits_low = point.bits_low;
  data.train = generate_samples(cfg.channel, pilot, data.partition, quantizer,
                                cfg.point_seed(point, "data/train"),
                                cfg.sizes.train);
  data.val = generate_samples(cfg.channel, pilot, data.partition, quantizer,
                              cfg.point_seed(point, "data/val"), cfg.sizes.val);
  data.test = generate_samples(cfg.test_channel(), pilot, data.partition,
                               quantizer, cfg.point_seed(point, "data/test"),
                               cfg.sizes.test);
  return data;
}

void write_point_datasets(const ExperimentConfig& cfg,
                          const OperatingPoint& point, const PointData& data,
                          const fs::path& dir) {
  write_sample_set(dir / "train.bin", data.train,
                   cfg.point_seed(point, "data/train"));
  write_sample_set(dir / "val.bin", data.val, cfg.point_seed(point, "data/val"));
  write_sample_set(dir / "test.bin", data.test,
                   cfg.point_seed(point, "data/test"));
}

bool method_configured(const ExperimentConfig& cfg, const std::string& method) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), method) !=
         cfg.methods.end();
}

}  // namespace

void save_bundle(const fs::path& dir, const EstimatorBundle& bundle,
                 const std::string& name) {
  bundle.validate();
  nlohmann::json j;
  j["kind"] = bundle.kind == EstimatorKind::kDi ? "di" : "sip";
  j["c"] = bundle.c;
  j["partition"] = {{"set_a", bundle.partition.set_a()},
                    {"set_b", bundle.partition.set_b()}};
  nlohmann::json ckpts = nlohmann::json::object();
  if (bundle.kind == EstimatorKind::kDi) {
    ckpts["di"] = "di.ckpt";
  } else {
    ckpts["r"] = "r.ckpt";
    if (bundle.mp_model) ckpts["mp"] = "mp.ckpt";
  }
  j["checkpoints"] = ckpts;
  std::ofstream out(dir / (name + ".json"));
  if (!out) throw std::runtime_error("cannot write bundle manifest in " +
                                     dir.string());
  out << j.dump(2) << "\n";
}

EstimatorBundle load_bundle(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open bundle manifest: " +
                                    manifest_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed bundle manifest " +
                             manifest_path.string() + ": " + e.what());
  }
  EstimatorBundle bundle;
  std::string kind = j.at("kind");
  bundle.kind = kind == "di" ? EstimatorKind::kDi : EstimatorKind::kSip;
  bundle.c = j.at("c");
  bundle.partition = AntennaPartition::from_sets(
      j.at("partition").at("set_a").get<std::vector<int>>(),
      j.at("partition").at("set_b").get<std::vector<int>>());
  fs::path dir = manifest_path.parent_path();
  const nlohmann::json& ckpts = j.at("checkpoints");
  if (bundle.kind == EstimatorKind::kDi) {
    bundle.di_model = load_checkpoint(dir / ckpts.at("di").get<std::string>());
  } else {
    bundle.r_model = load_checkpoint(dir / ckpts.at("r").get<std::string>());
    if (ckpts.contains("mp"))
      bundle.mp_model = load_checkpoint(dir / ckpts.at("mp").get<std::string>());
  }
  bundle.validate();
  return bundle;
}

int cmd_generate(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  std::vector<OperatingPoint> points = cfg.enumerate_points();
  if (options.dry_run) {
    for (const OperatingPoint& p : points) {
      std::cout << point_id(p) << ": would write datasets to "
                << point_dir(cfg, p).generic_string() << "\n";
    }
    return 0;
  }
  write_root_metadata(cfg);
  auto statuses = for_each_point(points, options.workers,
                                 [&](const OperatingPoint& point) {
    PointStatus status{point_id(point), "computed", ""};
    try {
      fs::path dir = point_dir(cfg, point);
      fs::create_directories(dir);
      PointData data = make_point_data(cfg, point);
      write_point_datasets(cfg, point, data, dir);
      write_point_manifest(cfg, point, dir);
      status.detail = std::to_string(cfg.sizes.train) + "/" +
                      std::to_string(cfg.sizes.val) + "/" +
                      std::to_string(cfg.sizes.test) + " samples";
    } catch (const std::exception& e) {
      status.status = "failed";
      status.detail = e.what();
    }
    return status;
  });
  return print_summary(statuses);
}

int cmd_train(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  if (!options.method.empty() && options.method != "di" &&
      options.method != "sip")
    throw std::invalid_argument("--method must be di or sip");
  std::vector<OperatingPoint> points = cfg.enumerate_points();
  if (options.dry_run) {
    for (const OperatingPoint& p : points) {
      std::cout << point_id(p) << ": would train "
                << (options.method.empty() ? "configured methods"
                                           : options.method)
                << "\n";
    }
    return 0;
  }
  write_root_metadata(cfg);
  auto statuses = for_each_point(points, options.workers,
                                 [&](const OperatingPoint& point) {
    PointStatus status{point_id(point), "computed", ""};
    fs::path dir = point_dir(cfg, point);
    try {
      SampleSet train_set = read_sample_set(dir / "train.bin");
      SampleSet val_set = read_sample_set(dir / "val.bin");
      AntennaPartition partition =
          make_partition(cfg.channel.antenna_count, point.eta, point.pattern,
                         cfg.point_seed(point, "partition"));
      bool want_di = options.method.empty() ? method_configured(cfg, "di")
                                            : options.method == "di";
      bool want_sip = options.method.empty() ? method_configured(cfg, "sip")
                                             : options.method == "sip";
      TrainedNets nets;
      try {
        nets = train_point_nets(cfg, point, partition, train_set, val_set,
                                want_di, want_sip);
      } catch (const TrainingDivergence& e) {
        write_trace_csv(dir / "trace_diverged.csv", e.partial_trace);
        throw;
      }
      persist_nets(dir, nets);
      std::string trained;
      if (nets.di) trained += "di ";
      if (nets.sip) trained += "sip";
      status.detail = trained.empty() ? "nothing to train" : trained;
      if (nets.di_stats.rejected + nets.sip_stats.rejected > 0) {
        std::cerr << "warning: " << point_id(point) << ": rejected "
                  << nets.di_stats.rejected + nets.sip_stats.rejected
                  << " samples with targets outside the tanh range\n";
      }
    } catch (const std::exception& e) {
      status.status = "failed";
      status.detail = e.what();
    }
    return status;
  });
  return print_summary(statuses);
}

int cmd_evaluate(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  std::vector<OperatingPoint> points = cfg.enumerate_points();
  if (options.dry_run) {
    for (const OperatingPoint& p : points) {
      std::cout << point_id(p) << ": would evaluate";
      for (const std::string& m : cfg.methods) std::cout << " " << m;
      std::cout << "\n";
    }
    return 0;
  }
  write_root_metadata(cfg);
  std::vector<NmseReport> all_reports;
  std::vector<std::string> warnings;
  std::vector<PointStatus> statuses;
  for (const OperatingPoint& point : points) {
    PointStatus status{point_id(point), "computed", ""};
    fs::path dir = point_dir(cfg, point);
    try {
      SampleSet test_set = read_sample_set(dir / "test.bin");
      AntennaPartition partition =
          make_partition(cfg.channel.antenna_count, point.eta, point.pattern,
                         cfg.point_seed(point, "partition"));
      std::optional<EstimatorBundle> di_bundle, sip_bundle;
      if (method_configured(cfg, "di")) {
        if (fs::exists(dir / "di.json")) {
          di_bundle = load_bundle(dir / "di.json");
        } else {
          warnings.push_back(point_id(point) + ": missing checkpoint for di, row skipped");
        }
      }
      if (method_configured(cfg, "sip") && !partition.set_a().empty()) {
        if (fs::exists(dir / "sip.json")) {
          sip_bundle = load_bundle(dir / "sip.json");
        } else {
          warnings.push_back(point_id(point) + ": missing checkpoint for sip, row skipped");
        }
      }
      std::vector<NmseReport> reports = evaluate_methods(
          cfg, point, partition, test_set, di_bundle ? &*di_bundle : nullptr,
          sip_bundle ? &*sip_bundle : nullptr);
      fill_model_paths(reports, point);
      all_reports.insert(all_reports.end(), reports.begin(), reports.end());
      status.detail = std::to_string(reports.size()) + " rows";
    } catch (const std::exception& e) {
      status.status = "failed";
      status.detail = e.what();
    }
    statuses.push_back(status);
  }
  if (!warnings.empty()) {
    std::ofstream log(fs::path(cfg.out_dir) / "evaluate_warnings.log");
    for (const std::string& w : warnings) log << w << "\n";
  }
  write_report_csv(fs::path(cfg.out_dir) / "report.csv", all_reports);
  return print_summary(statuses);
}

int cmd_sweep(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  std::vector<OperatingPoint> points = cfg.enumerate_points();

  auto is_done = [&](const OperatingPoint& point) {
    fs::path dir = point_dir(cfg, point);
    return fs::exists(dir / "report.csv") &&
           point_manifest_matches(cfg, point, dir);
  };

  if (options.dry_run) {
    for (const OperatingPoint& p : points) {
      std::cout << point_id(p) << ": "
                << (is_done(p) ? "up to date, would skip" : "would compute")
                << "\n";
    }
    return 0;
  }

  write_root_metadata(cfg);
  auto statuses = for_each_point(points, options.workers,
                                 [&](const OperatingPoint& point) {
    PointStatus status{point_id(point), "computed", ""};
    fs::path dir = point_dir(cfg, point);
    if (is_done(point)) {
      status.status = "skipped";
      status.detail = "outputs up to date";
      return status;
    }
    try {
      fs::create_directories(dir);
      PointData data = make_point_data(cfg, point);
      write_point_datasets(cfg, point, data, dir);
      bool want_di = method_configured(cfg, "di");
      bool want_sip = method_configured(cfg, "sip");
      TrainedNets nets;
      try {
        nets = train_point_nets(cfg, point, data.partition, data.train,
                                data.val, want_di, want_sip);
      } catch (const TrainingDivergence& e) {
        write_trace_csv(dir / "trace_diverged.csv", e.partial_trace);
        throw;
      }
      persist_nets(dir, nets);
      std::vector<NmseReport> reports = evaluate_methods(
          cfg, point, data.partition, data.test,
          nets.di ? &*nets.di : nullptr, nets.sip ? &*nets.sip : nullptr);
      fill_model_paths(reports, point);
      write_report_csv(dir / "report.csv", reports);
      write_point_manifest(cfg, point, dir);
      nlohmann::json sj = {{"point", point_id(point)}, {"status", "ok"}};
      std::ofstream(dir / "status.json") << sj.dump(2) << "\n";
      status.detail = std::to_string(reports.size()) + " rows";
    } catch (const std::exception& e) {
      status.status = "failed";
      status.detail = e.what();
      nlohmann::json sj = {{"point", point_id(point)},
                           {"status", "failed"},
                           {"error", e.what()}};
      std::ofstream(dir / "status.json") << sj.dump(2) << "\n";
    }
    return status;
  });

  // Merge every available per-point report into the top-level CSV.
  std::vector<NmseReport> merged;
  for (const OperatingPoint& point : points) {
    fs::path report_path = point_dir(cfg, point) / "report.csv";
    if (!fs::exists(report_path)) continue;
    std::vector<NmseReport> rows = read_report_csv(report_path);
    merged.insert(merged.end(), rows.begin(), rows.end());
  }
  write_report_csv(fs::path(cfg.out_dir) / "report.csv", merged);
  return print_summary(statuses);
}

}  // namespace mixce
