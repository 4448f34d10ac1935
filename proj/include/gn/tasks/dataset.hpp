#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gn/graph_json.hpp"
#include "gn/tasks/sample.hpp"

namespace gn::tasks {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One sample per line: {"task": name, "input": graph, "target": graph}.

Json sample_to_json(const Sample& s);
Sample sample_from_json(const Json& j);

/// Throws IoError if the file cannot be written.
void write_jsonl(const std::string& path, const std::vector<Sample>& samples);
/// Throws IoError if the file cannot be read, ParseError naming the line on
/// malformed content.
std::vector<Sample> read_jsonl(const std::string& path);

/// Writes a CSV with header `step,<columns...>`.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::pair<std::size_t, std::vector<double>>>& rows);

/// Writes via a temporary file and a rename, so a crash never leaves a
/// half-written file behind.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace gn::tasks
