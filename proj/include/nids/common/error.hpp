#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nids {

/// Bad or missing input data: unreadable files, malformed rows, datasets that
/// cannot satisfy a sampling request.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A CSV row that could not be ingested. `line()` is 1-based and counts the
/// header row as line 1.
class CsvError : public DataError {
 public:
  CsvError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Experiment configuration that fails validation. `field()` names the
/// offending key using a dotted path, e.g. "algorithms[0].name".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Training aborted, e.g. the loss became non-finite.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nids
