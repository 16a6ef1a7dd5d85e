#include "tesslab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tesslab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config: bad numeric value for '" + key + "': " + item);
    }
  }
  if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
  return out;
}

double parse_num(const std::string& value, const std::string& key) {
  const auto list = parse_list(value, key);
  if (list.size() != 1) throw ConfigError("config: scalar expected for '" + key + "'");
  return list.front();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  bool versioned = false;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      if (line.find("tesslab-config v1") != std::string::npos) versioned = true;
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "experiment") {
      cfg.experiment = value;
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_num(value, key));
    } else if (key == "replicates") {
      cfg.replicates = static_cast<long>(parse_num(value, key));
    } else if (key == "T") {
      cfg.T_list = parse_list(value, key);
    } else if (key == "alpha") {
      cfg.alpha = parse_num(value, key);
    } else if (key == "lambda") {
      cfg.lambda = parse_num(value, key);
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_num(value, key));
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "label") {
      cfg.label = value;
    } else if (key == "window") {
      cfg.window_half_side = parse_num(value, key);
    } else if (key == "traces") {
      cfg.traces = static_cast<long>(parse_num(value, key));
    } else if (key == "trace_T") {
      cfg.trace_T = parse_num(value, key);
    } else if (key == "second_center_x") {
      cfg.second_center_x = parse_num(value, key);
    } else if (key == "second_center_y") {
      cfg.second_center_y = parse_num(value, key);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  (void)versioned;  // the header comment is advisory; absence is tolerated
  if (cfg.replicates < 1) throw ConfigError("config: replicates must be >= 1");
  for (double t : cfg.T_list)
    if (t <= 0.0) throw ConfigError("config: T values must be positive");
  if (cfg.workers < 1) throw ConfigError("config: workers must be >= 1");
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_text(buffer.str());
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  out << "# tesslab-config v1\n";
  out << "experiment = " << experiment << "\n";
  out << "seed = " << seed << "\n";
  out << "replicates = " << replicates << "\n";
  out << "T = ";
  for (std::size_t i = 0; i < T_list.size(); ++i) out << (i ? "," : "") << T_list[i];
  out << "\n";
  out << "alpha = " << alpha << "\n";
  out << "lambda = " << lambda << "\n";
  out << "workers = " << workers << "\n";
  out << "out = " << out_dir << "\n";
  out << "label = " << label << "\n";
  out << "window = " << window_half_side << "\n";
  out << "traces = " << traces << "\n";
  out << "trace_T = " << trace_T << "\n";
  out << "second_center_x = " << second_center_x << "\n";
  out << "second_center_y = " << second_center_y << "\n";
  return out.str();
}

}  // namespace tesslab
