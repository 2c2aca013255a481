#include "d2t/data/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "d2t/data/tokenize.hpp"
#include "d2t/errors.hpp"
#include "json.hpp"

namespace d2t::data {
namespace {

using nlohmann::json;

const std::vector<std::string> kIdentityColumns = {"PLAYER_NAME", "TEAM_CITY", "TEAM", "H/V"};

std::string cell_string(const json& cell) {
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_number_integer()) return std::to_string(cell.get<long long>());
  if (cell.is_number()) return json(cell).dump();
  if (cell.is_null()) return "";
  return cell.dump();
}

bool empty_cell(const std::string& s) { return s.empty() || s == "N/A"; }

// Index of the top-level array element containing byte `offset`.
std::size_t element_at(const std::string& text, std::size_t offset) {
  std::size_t index = 0;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size() && i < offset; ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '[' || c == '{') ++depth;
    else if (c == ']' || c == '}') --depth;
    else if (c == ',' && depth == 1) ++index;
  }
  return index;
}

const json& require(const json& obj, const char* key, std::size_t game) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw DataError("game " + std::to_string(game) + ": missing required field '" + key + "'");
  }
  return *it;
}

std::vector<std::string> summary_tokens(const json& summary) {
  std::string text;
  if (summary.is_array()) {
    for (const json& t : summary) {
      if (!text.empty()) text += ' ';
      text += cell_string(t);
    }
  } else {
    text = cell_string(summary);
  }
  return tokenize_summary(text);
}

}  // namespace

void write_jsonl(std::ostream& out, const std::vector<GameInstance>& games) {
  for (const GameInstance& g : games) {
    json records = json::array();
    for (const Record& r : g.records) records.push_back(r.features);
    json obj;
    obj["id"] = g.id;
    obj["records"] = std::move(records);
    obj["summary"] = g.summary;
    out << obj.dump() << '\n';
  }
}

std::vector<GameInstance> read_jsonl(std::istream& in, const RecordSchema& schema) {
  std::vector<GameInstance> games;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json obj = json::parse(line);
      GameInstance g;
      g.id = obj.at("id").get<std::string>();
      for (const json& r : obj.at("records")) {
        g.records.push_back(Record{r.get<std::vector<std::string>>()});
      }
      g.summary = obj.at("summary").get<std::vector<std::string>>();
      validate_instance(g, schema);
      games.push_back(std::move(g));
    } catch (const json::exception& e) {
      throw DataError("jsonl line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return games;
}

void save_jsonl(const std::filesystem::path& path, const std::vector<GameInstance>& games) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_jsonl(out, games);
}

std::vector<GameInstance> load_jsonl(const std::filesystem::path& path,
                                     const RecordSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return read_jsonl(in, schema);
}

void save_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "schema.txt") << dataset.schema.name() << '\n';
  save_jsonl(dir / "train.jsonl", dataset.train);
  save_jsonl(dir / "dev.jsonl", dataset.dev);
  save_jsonl(dir / "test.jsonl", dataset.test);
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream schema_in(dir / "schema.txt");
  if (!schema_in) throw DataError("missing " + (dir / "schema.txt").string());
  std::string schema_name;
  schema_in >> schema_name;
  Dataset d;
  d.schema = RecordSchema::parse(schema_name);
  d.train = load_jsonl(dir / "train.jsonl", d.schema);
  if (std::filesystem::exists(dir / "dev.jsonl")) d.dev = load_jsonl(dir / "dev.jsonl", d.schema);
  if (std::filesystem::exists(dir / "test.jsonl")) {
    d.test = load_jsonl(dir / "test.jsonl", d.schema);
  }
  validate_disjoint(d);
  return d;
}

std::vector<GameInstance> parse_rotowire_json(const std::string& text, const RecordSchema& schema,
                                              const std::string& id_prefix) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("malformed JSON in game " + std::to_string(element_at(text, e.byte)) + ": " +
                    e.what());
  }
  if (!root.is_array()) throw DataError("RotoWire input must be a JSON array of games");

  const bool mlb = schema.kind == SchemaKind::mlb6;
  std::vector<GameInstance> games;
  for (std::size_t gi = 0; gi < root.size(); ++gi) {
    const json& game = root[gi];
    if (!game.is_object()) throw DataError("game " + std::to_string(gi) + " is not an object");
    const json& box = require(game, "box_score", gi);
    const json& home_line = require(game, "home_line", gi);
    const json& vis_line = require(game, "vis_line", gi);
    const std::string home_name = cell_string(require(game, "home_name", gi));
    const std::string home_city = game.contains("home_city") ? cell_string(game["home_city"]) : "";

    auto make = [&](std::string value, std::string entity, std::string type, std::string ha) {
      Record r;
      r.features = {std::move(value), std::move(entity), std::move(type), std::move(ha)};
      if (mlb) {
        r.features.emplace_back(kNoValue);
        r.features.emplace_back(kNoValue);
      }
      return r;
    };

    // Row keys sorted numerically.
    std::vector<std::string> row_keys;
    if (box.contains("PLAYER_NAME")) {
      for (const auto& [k, v] : box["PLAYER_NAME"].items()) row_keys.push_back(k);
    }
    std::sort(row_keys.begin(), row_keys.end(), [](const std::string& a, const std::string& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    auto is_home = [&](const std::string& row) {
      auto cell = [&](const char* col) {
        return box.contains(col) && box[col].contains(row) ? cell_string(box[col][row]) : "";
      };
      if (box.contains("H/V")) return cell("H/V") == "H";
      if (box.contains("TEAM_CITY") && !home_city.empty()) return cell("TEAM_CITY") == home_city;
      return cell("TEAM") == home_name;
    };

    std::vector<Record> home, away;
    for (const std::string& row : row_keys) {
      const std::string player = cell_string(box["PLAYER_NAME"][row]);
      if (player.empty()) continue;
      const bool h = is_home(row);
      for (const auto& [column, cells] : box.items()) {
        if (std::find(kIdentityColumns.begin(), kIdentityColumns.end(), column) !=
            kIdentityColumns.end()) {
          continue;
        }
        if (!cells.contains(row)) continue;
        const std::string value = cell_string(cells[row]);
        if (empty_cell(value)) continue;
        (h ? home : away).push_back(make(value, player, column, h ? kHome : kAway));
      }
    }
    auto line_records = [&](const json& line, const std::string& fallback, bool h) {
      std::vector<Record> out;
      const std::string team =
          line.contains("TEAM-NAME") ? cell_string(line["TEAM-NAME"]) : fallback;
      for (const auto& [type, cell] : line.items()) {
        const std::string value = cell_string(cell);
        if (empty_cell(value)) continue;
        out.push_back(make(value, team, type, h ? kHome : kAway));
      }
      return out;
    };
    const std::string vis_name = game.contains("vis_name") ? cell_string(game["vis_name"]) : "";

    GameInstance g;
    g.id = game.contains("id") ? cell_string(game["id"]) : id_prefix + std::to_string(gi);
    g.records = home;
    for (Record& r : line_records(home_line, home_name, true)) g.records.push_back(std::move(r));
    g.records.insert(g.records.end(), away.begin(), away.end());
    for (Record& r : line_records(vis_line, vis_name, false)) g.records.push_back(std::move(r));

    if (mlb && game.contains("plays")) {
      std::map<std::string, std::string> side;
      for (const Record& r : g.records) side.emplace(r.entity(), r.home_away());
      std::size_t index = 0;
      for (const json& play : game["plays"]) {
        const std::string batter = cell_string(require(play, "batter", gi));
        Record r;
        r.features = {kNoValue,
                      batter,
                      cell_string(require(play, "event", gi)) + "-batter",
                      side.count(batter) ? side[batter] : kAway,
                      cell_string(require(play, "inning", gi)),
                      std::to_string(index++)};
        g.records.push_back(std::move(r));
      }
    }
    g.summary = summary_tokens(require(game, "summary", gi));
    validate_instance(g, schema);
    games.push_back(std::move(g));
  }
  return games;
}

std::vector<GameInstance> load_rotowire_json(const std::filesystem::path& path,
                                             const RecordSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_rotowire_json(buf.str(), schema, path.stem().string() + "-");
}

}  // namespace d2t::data
