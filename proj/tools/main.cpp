// swiperec command line: batch workflows over an event store plus the HTTP
// service. Every failure prints machine-readable error JSON on stderr and
// exits nonzero.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "swiperec/dedup.hpp"
#include "swiperec/engine.hpp"
#include "swiperec/error.hpp"
#include "swiperec/eventstore.hpp"
#include "swiperec/json_io.hpp"
#include "swiperec/service.hpp"
#include "swiperec/simulator.hpp"
#include "swiperec/timeutil.hpp"

namespace {

using namespace swiperec;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return 2;
    case ErrorKind::NotFound: return 3;
    case ErrorKind::Store: return 4;
    case ErrorKind::Config: return 5;
  }
  return 1;
}

std::string default_store() {
  if (const char* env = std::getenv("SWIPEREC_STORE")) return env;
  return "./store";
}

std::optional<TimeWindow> window_from(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  return parse_window(spec);
}

EngineOptions engine_options(const std::string& clusters_file) {
  EngineOptions options;
  if (!clusters_file.empty()) options.clusters_file = clusters_file;
  return options;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Store, "cannot read file " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void print_evaluation(const EvaluationReport& report, const std::string& format) {
  const nlohmann::json j = to_json(report);
  if (format == "json") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (format == "jsonl") {
    for (const char* section : {"dataset", "funnel", "user"}) {
      nlohmann::json line{{"section", section}};
      line.merge_patch(j.at(section));
      std::cout << line.dump() << '\n';
    }
    for (const auto& bucket : j.at("buckets")) {
      nlohmann::json line{{"section", "bucket"}};
      line.merge_patch(bucket);
      std::cout << line.dump() << '\n';
    }
    return;
  }
  // Delimited tables: one key/value section per perspective, then the bucket
  // rows ready for external plotting.
  std::cout << "# dataset\n";
  for (const auto& [key, value] : j.at("dataset").items()) {
    std::cout << key << '\t' << value.dump() << '\n';
  }
  std::cout << "# funnel\n";
  for (const auto& [key, value] : j.at("funnel").items()) {
    if (key == "display") continue;
    std::cout << key << '\t' << value.dump() << '\n';
  }
  std::cout << "funnel_display\t" << report.funnel.recommended_share_display() << '\t'
            << report.funnel.precision_display() << '\n';
  std::cout << "# user\n";
  for (const auto& [key, value] : j.at("user").items()) {
    std::cout << key << '\t' << value.dump() << '\n';
  }
  std::cout << "# buckets (lower upper impressions positives precision)\n";
  for (const SimilarityBucket& b : report.buckets) {
    std::cout << b.lower << '\t' << b.upper << '\t' << b.impressions << '\t' << b.positives
              << '\t' << (b.precision ? std::to_string(*b.precision) : "-") << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collaborative-filtering recommender over swipe feedback"};
  app.require_subcommand(1);

  std::string store = default_store();
  std::string clusters_file;
  std::string window_spec;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate and append events from a JSON-lines file");
  std::string events_file;
  ingest->add_option("events-file", events_file, "JSON-lines event file")->required();
  ingest->add_option("--store", store, "store directory");

  // dedup
  auto* dedup = app.add_subcommand("dedup", "cluster near-duplicate product titles");
  std::string catalogue_file;
  double threshold = 0.85;
  std::string map_out = "clusters.tsv";
  dedup->add_option("catalogue-file", catalogue_file, "catalogue JSON-lines file")->required();
  dedup->add_option("--threshold", threshold, "similarity threshold (exclusive)");
  dedup->add_option("--out", map_out, "output mapping file");

  // recommend
  auto* recommend_cmd = app.add_subcommand("recommend", "print a recommendation for a user");
  std::string user;
  std::size_t top_n = 5;
  recommend_cmd->add_option("--user", user, "target user id")->required();
  recommend_cmd->add_option("--n", top_n, "products to queue");
  recommend_cmd->add_option("--clusters", clusters_file, "cluster map file");
  recommend_cmd->add_option("--store", store, "store directory");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "dataset, system and user metrics");
  std::string format = "json";
  evaluate_cmd->add_option("--window", window_spec, "time window FROM..TO");
  evaluate_cmd->add_option("--clusters", clusters_file, "cluster map file");
  evaluate_cmd->add_option("--store", store, "store directory");
  evaluate_cmd->add_option("--format", format, "json, jsonl or table")
      ->check(CLI::IsMember({"json", "jsonl", "table"}));

  // abtest
  auto* abtest_cmd = app.add_subcommand("abtest", "per-variant funnel comparison");
  std::string experiment_file;
  abtest_cmd->add_option("--experiment", experiment_file, "experiment JSON file")->required();
  abtest_cmd->add_option("--window", window_spec, "time window FROM..TO");
  abtest_cmd->add_option("--clusters", clusters_file, "cluster map file");
  abtest_cmd->add_option("--store", store, "store directory");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "generate a synthetic event store");
  std::string config_file;
  std::string out_dir;
  simulate_cmd->add_option("--config", config_file, "simulation config JSON")->required();
  simulate_cmd->add_option("--out", out_dir, "output store directory")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP JSON service");
  std::string listen = "127.0.0.1:8080";
  int refresh_interval = 0;
  serve_cmd->add_option("--store", store, "store directory");
  serve_cmd->add_option("--listen", listen, "host:port to bind");
  serve_cmd->add_option("--refresh-interval", refresh_interval,
                        "seconds between snapshot rebuilds (0 = manual)");
  serve_cmd->add_option("--clusters", clusters_file, "cluster map file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      Engine engine(store);
      const IngestResult result = engine.ingest_lines(read_file(events_file));
      std::cout << to_json(result).dump() << '\n';
      return 0;
    }

    if (*dedup) {
      const auto products = load_catalogue(catalogue_file);
      const ProductClusterMap map = cluster_products(products, threshold);
      map.save(map_out);
      std::cout << nlohmann::json{{"products", products.size()},
                                  {"clusters", map.cluster_count()},
                                  {"threshold", threshold},
                                  {"out", map_out}}
                       .dump()
                << '\n';
      return 0;
    }

    if (*recommend_cmd) {
      Engine engine(store, engine_options(clusters_file));
      std::cout << to_json(engine.recommend(user, top_n)).dump() << '\n';
      return 0;
    }

    if (*evaluate_cmd) {
      Engine engine(store, engine_options(clusters_file));
      print_evaluation(engine.evaluate(window_from(window_spec)), format);
      return 0;
    }

    if (*abtest_cmd) {
      Engine engine(store, engine_options(clusters_file));
      const Experiment experiment = Experiment::load(experiment_file);
      std::cout << to_json(engine.compare(experiment, window_from(window_spec))).dump(2) << '\n';
      return 0;
    }

    if (*simulate_cmd) {
      const SimulationConfig config = SimulationConfig::load(config_file);
      const SimulationSummary summary = simulate(config, out_dir);
      std::cout << nlohmann::json{{"store", out_dir},
                                  {"users", summary.users},
                                  {"products", summary.products},
                                  {"sessions", summary.sessions},
                                  {"swipes", summary.swipes},
                                  {"impressions", summary.impressions},
                                  {"recommender_impressions", summary.recommender_impressions},
                                  {"referral_clicks", summary.referral_clicks}}
                       .dump()
                << '\n';
      return 0;
    }

    if (*serve_cmd) {
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) {
        throw Error(ErrorKind::Config, "--listen wants host:port, got '" + listen + "'");
      }
      const std::string host = listen.substr(0, colon);
      const int port = std::stoi(listen.substr(colon + 1));
      Engine engine(store, engine_options(clusters_file));
      HttpService service(engine, HttpServiceOptions{refresh_interval});
      const int bound = service.start(host, port);
      std::cerr << "serving " << store << " on " << host << ":" << bound << '\n';
      service.wait();
      return 0;
    }
  } catch (const Error& err) {
    std::cerr << error_json(err.kind(), err.what()).dump() << '\n';
    return exit_code_for(err.kind());
  } catch (const std::exception& ex) {
    std::cerr << error_json(ErrorKind::Store, ex.what()).dump() << '\n';
    return 1;
  }
  return 0;
}
