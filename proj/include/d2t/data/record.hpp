#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace d2t::data {

// Positions of the record features. Box-score rows carry kNoValue for the
// inning and play-index roles; valueless play events carry it as their value.
enum FeatureRole : std::size_t {
  kValue = 0,
  kEntity = 1,
  kType = 2,
  kHomeAway = 3,
  kInning = 4,
  kPlayIndex = 5,
};

inline constexpr const char* kNoValue = "-1";
inline constexpr const char* kHome = "HOME";
inline constexpr const char* kAway = "AWAY";

enum class SchemaKind { rw4, mlb6 };

struct RecordSchema {
  SchemaKind kind = SchemaKind::rw4;

  std::size_t feature_count() const { return kind == SchemaKind::rw4 ? 4 : 6; }
  static RecordSchema parse(const std::string& name);
  std::string name() const { return kind == SchemaKind::rw4 ? "rw4" : "mlb6"; }
  bool operator==(const RecordSchema&) const = default;
};

struct Record {
  std::vector<std::string> features;

  const std::string& value() const { return features[kValue]; }
  const std::string& entity() const { return features[kEntity]; }
  const std::string& type() const { return features[kType]; }
  const std::string& home_away() const { return features[kHomeAway]; }
  bool operator==(const Record&) const = default;
};

// Records ordered home box rows, away box rows, then play-by-play by time.
struct GameInstance {
  std::string id;
  std::vector<Record> records;
  std::vector<std::string> summary;
  bool operator==(const GameInstance&) const = default;
};

struct Dataset {
  RecordSchema schema;
  std::vector<GameInstance> train;
  std::vector<GameInstance> dev;
  std::vector<GameInstance> test;
};

// Throws DataError when a record has the wrong arity or an empty entity.
void validate_instance(const GameInstance& game, const RecordSchema& schema);
// Throws DataError if two splits share a game id.
void validate_disjoint(const Dataset& dataset);

// Entity strings in order of first appearance.
std::vector<std::string> entities_in_order(const GameInstance& game);

}  // namespace d2t::data
