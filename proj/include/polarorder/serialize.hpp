#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarorder/channel.hpp"
#include "polarorder/delta.hpp"
#include "polarorder/infoset.hpp"
#include "polarorder/ordering.hpp"

namespace polarorder {

inline nlohmann::json channel_to_json(const Channel& w) {
  return nlohmann::json{{"outputs", w.output_labels()}, {"row0", w.row0()}, {"row1", w.row1()}};
}

// Accepts {"outputs": [...], "row0": [...], "row1": [...]} or one of the
// shorthand forms {"bsc": e}, {"bec": e}, {"z": p}.
inline Channel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("channel JSON must be an object");
  if (j.contains("bsc")) return make_bsc(j.at("bsc").get<double>());
  if (j.contains("bec")) return make_bec(j.at("bec").get<double>());
  if (j.contains("z")) return make_z(j.at("z").get<double>());
  if (!j.contains("outputs") || !j.contains("row0") || !j.contains("row1")) {
    throw std::invalid_argument("channel JSON needs outputs, row0, and row1 (or a bsc/bec/z shorthand)");
  }
  std::vector<std::string> labels;
  for (const auto& l : j.at("outputs")) {
    labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
  }
  return Channel(labels, j.at("row0").get<std::vector<double>>(), j.at("row1").get<std::vector<double>>());
}

inline Channel load_channel_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open channel file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("cannot parse channel file '" + path.string() + "': " + e.what());
  }
  return channel_from_json(j);
}

// value,weight rows with 17 significant digits, one atom per line.
inline std::string delta_to_csv(const DeltaDistribution& d) {
  std::string out = "value,weight\n";
  for (const Atom& a : d.atoms()) {
    out += detail::format_double(a.value);
    out += ',';
    out += detail::format_double(a.weight);
    out += '\n';
  }
  return out;
}

inline DeltaDistribution delta_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<Atom> atoms;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "value,weight") continue;
    }
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("CSV row '" + line + "' is not 'value,weight'");
    try {
      atoms.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse CSV row '" + line + "'");
    }
  }
  return DeltaDistribution(std::move(atoms));
}

inline nlohmann::json kernel_to_json(const Kernel& k) {
  return nlohmann::json{
      {"inputs", k.input_labels()}, {"outputs", k.output_labels()}, {"rows", k.rows()}};
}

inline nlohmann::json verdict_to_json(const OrderingVerdict& v) {
  nlohmann::json j{{"holds", v.holds}, {"method", v.method}};
  if (std::holds_alternative<std::monostate>(v.witness)) {
    j["witness"] = {{"kind", "none"}};
  } else if (const auto* cut = std::get_if<CutThreshold>(&v.witness)) {
    j["witness"] = {{"kind", "cut_threshold"}, {"delta", cut->delta}};
  } else if (const auto* viol = std::get_if<ViolationWitness>(&v.witness)) {
    j["witness"] = {{"kind", "violating_point"},
                    {"t", viol->t},
                    {"stop_loss_left", viol->stop_loss_left},
                    {"stop_loss_right", viol->stop_loss_right}};
  } else {
    const auto& k = std::get<Kernel>(v.witness);
    j["witness"] = {{"kind", "kernel"}, {"kernel", kernel_to_json(k)}};
  }
  return j;
}

inline nlohmann::json info_set_summary_json(const InfoSet& s) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& e : s.entries) {
    if (e.member) members.push_back(e.sequence.str());
  }
  nlohmann::json j{{"n", s.n},
                   {"phi", s.phi},
                   {"eps", s.eps},
                   {"size", std::size_t{1} << s.n},
                   {"members", std::move(members)}};
  if (s.budget) {
    j["budget"] = *s.budget;
  } else {
    j["budget"] = nullptr;
  }
  return j;
}

// sequence,index,value,member rows ordered by index.
inline std::string info_set_report_csv(const InfoSet& s) {
  std::string out = "sequence,index,value,member\n";
  for (const auto& e : s.entries) {
    out += e.sequence.str();
    out += ',';
    out += std::to_string(e.sequence.index());
    out += ',';
    out += detail::format_double(e.value);
    out += ',';
    out += e.member ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace polarorder
