#include "gn/tasks/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gn::tasks {

Json sample_to_json(const Sample& s) {
  Json j;
  j["task"] = to_string(s.task);
  j["input"] = graph_to_json(s.input);
  j["target"] = graph_to_json(s.target);
  return j;
}

Sample sample_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("sample must be an object", 0);
  for (const char* key : {"task", "input", "target"})
    if (!j.contains(key)) throw ParseError(std::string("sample is missing \"") + key + "\"", 0);
  Sample s;
  try {
    s.task = task_from_string(j["task"].get<std::string>());
  } catch (const std::exception& e) {
    throw ParseError(std::string("sample task: ") + e.what(), 0);
  }
  s.input = graph_from_json(j["input"], "$.input");
  s.target = graph_from_json(j["target"], "$.target");
  return s;
}

void write_jsonl(const std::string& path, const std::vector<Sample>& samples) {
  std::string text;
  for (const Sample& s : samples) text += sample_to_json(s).dump() + "\n";
  write_text_atomic(path, text);
}

std::vector<Sample> read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::vector<Sample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(sample_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what(), e.byte);
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what(), e.position());
    }
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::pair<std::size_t, std::vector<double>>>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "step";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (const auto& [step, values] : rows) {
    os << step;
    for (double v : values) os << ',' << v;
    os << '\n';
  }
  write_text_atomic(path, os.str());
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot write '" + path + "': " + ec.message());
  }
}

}  // namespace gn::tasks
