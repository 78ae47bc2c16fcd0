#include "kgeval/report.hpp"

#include <array>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace kgeval {

using nlohmann::json;

json to_json(const GraphStats& s) {
  return {{"relations", s.relations}, {"entities", s.entities}, {"train", s.train},
          {"valid", s.valid},         {"test", s.test},         {"cross_split_overlap", s.cross_split_overlap}};
}

json to_json(const StatsReport& r) {
  return {{"dataset", r.dataset},
          {"relations", r.relations()},
          {"train_graph", to_json(r.train_graph)},
          {"test_graph", to_json(r.test_graph)}};
}

std::string stats_table(std::span<const StatsReport> reports) {
  std::size_t name_width = 7;
  for (const auto& r : reports) name_width = std::max(name_width, r.dataset.size());
  std::string out = fmt::format("{:<{}}  {:<5}  {:>5}  {:>6}  {:>7}  {:>6}  {:>6}\n", "dataset", name_width, "graph",
                                "#R", "#E", "train", "valid", "test");
  for (const auto& r : reports) {
    out += fmt::format("{:<{}}  {:<5}  {:>5}  {:>6}  {:>7}  {:>6}  {:>6}\n", r.dataset, name_width, "train",
                       r.relations(), r.train_graph.entities, r.train_graph.train, r.train_graph.valid,
                       r.train_graph.test);
    out += fmt::format("{:<{}}  {:<5}  {:>5}  {:>6}  {:>7}  {:>6}  {:>6}\n", "", name_width, "test",
                       r.test_graph.relations, r.test_graph.entities, r.test_graph.train, r.test_graph.valid,
                       r.test_graph.test);
  }
  return out;
}

json to_json(const MetricSummary& s) {
  json hits = json::object();
  for (const auto& [k, v] : s.hits) hits[std::to_string(k)] = v;
  return {{"hits", hits}, {"mrr", s.mrr}, {"tasks", s.tasks}};
}

json to_json(const MetricReport& r) {
  json j = {{"dataset", r.dataset}, {"model", r.model},           {"protocol", r.protocol},
            {"runs", r.runs},       {"overall", to_json(r.overall)}, {"head", to_json(r.head)},
            {"tail", to_json(r.tail)}};
  if (!r.tmn_checksum.empty()) j["tmn_sha256"] = r.tmn_checksum;
  return j;
}

MetricSummary summary_from_json(const json& j) {
  MetricSummary s;
  for (const auto& [k, v] : j.at("hits").items()) s.hits[std::stoi(k)] = v.get<double>();
  s.mrr = j.at("mrr").get<double>();
  s.tasks = j.at("tasks").get<std::size_t>();
  return s;
}

MetricReport report_from_json(const json& j) {
  MetricReport r;
  r.dataset = j.at("dataset").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.protocol = j.at("protocol").get<std::string>();
  r.runs = j.value("runs", std::size_t{1});
  r.overall = summary_from_json(j.at("overall"));
  r.head = summary_from_json(j.at("head"));
  r.tail = summary_from_json(j.at("tail"));
  r.tmn_checksum = j.value("tmn_sha256", std::string());
  return r;
}

void write_report_csv(std::ostream& out, std::span<const MetricReport> reports) {
  out << "dataset,model,protocol,direction,metric,k,value\n";
  for (const auto& r : reports) {
    const std::pair<const char*, const MetricSummary*> parts[] = {
        {"both", &r.overall}, {"head", &r.head}, {"tail", &r.tail}};
    for (const auto& [direction, s] : parts) {
      for (const auto& [k, v] : s->hits) {
        out << fmt::format("{},{},{},{},hits,{},{}\n", r.dataset, r.model, r.protocol, direction, k, v);
      }
      out << fmt::format("{},{},{},{},mrr,0,{}\n", r.dataset, r.model, r.protocol, direction, s->mrr);
    }
  }
}

std::string report_table(std::span<const MetricReport> reports) {
  std::string out;
  for (const auto& r : reports) {
    out += fmt::format("{:<16} {:<10} {:<13} tasks={:<6}", r.dataset, r.model, r.protocol, r.overall.tasks);
    for (const auto& [k, v] : r.overall.hits) out += fmt::format("  hits@{}={:.3f}", k, v);
    out += fmt::format("  mrr={:.3f}\n", r.overall.mrr);
  }
  return out;
}

void write_delta_csv(std::ostream& out, std::span<const DeltaRow> rows) {
  out << "model,protocol,metric,k,value,delta\n";
  for (const auto& row : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", row.model, row.protocol, row.metric, row.k, row.value, row.delta);
  }
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buffer;
  while (in.read(buffer.data(), buffer.size()) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest;
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace kgeval
