#ifndef SDG_PERSIST_HPP_
#define SDG_PERSIST_HPP_

#include <iosfwd>
#include <string>

#include "sdg/generator.hpp"

namespace sdg {

struct PersistError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaVersionError : PersistError {
  using PersistError::PersistError;
};
struct InvariantError : PersistError {
  using PersistError::PersistError;
};
struct ModelParseError : PersistError {
  using PersistError::PersistError;
};

// Canonical UTF-8 JSON: sorted object keys, shortest round-trip floats.
// The file carries fitted parameters only; no training records.
std::string model_to_json(const SdgModel& model);
void save_model(const SdgModel& model, std::ostream& sink);

SdgModel model_from_json(const std::string& text);
SdgModel load_model(std::istream& source);

}  // namespace sdg

#endif  // SDG_PERSIST_HPP_
