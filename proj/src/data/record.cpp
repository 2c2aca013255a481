#include "d2t/data/record.hpp"

#include <set>
#include <unordered_set>

#include "d2t/errors.hpp"

namespace d2t::data {

RecordSchema RecordSchema::parse(const std::string& name) {
  if (name == "rw4") return {SchemaKind::rw4};
  if (name == "mlb6") return {SchemaKind::mlb6};
  throw UsageError("unknown schema '" + name + "' (expected rw4 or mlb6)");
}

void validate_instance(const GameInstance& game, const RecordSchema& schema) {
  const std::size_t arity = schema.feature_count();
  for (std::size_t j = 0; j < game.records.size(); ++j) {
    const Record& r = game.records[j];
    if (r.features.size() != arity) {
      throw DataError("game " + game.id + " record " + std::to_string(j) + " has " +
                      std::to_string(r.features.size()) + " features, schema " +
                      schema.name() + " needs " + std::to_string(arity));
    }
    if (r.entity().empty()) {
      throw DataError("game " + game.id + " record " + std::to_string(j) + " has an empty entity");
    }
  }
}

void validate_disjoint(const Dataset& dataset) {
  std::set<std::string> seen;
  for (const auto* split : {&dataset.train, &dataset.dev, &dataset.test}) {
    for (const GameInstance& g : *split) {
      if (!seen.insert(g.id).second) throw DataError("duplicate game id across splits: " + g.id);
    }
  }
}

std::vector<std::string> entities_in_order(const GameInstance& game) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const Record& r : game.records) {
    if (seen.insert(r.entity()).second) out.push_back(r.entity());
  }
  return out;
}

}  // namespace d2t::data
