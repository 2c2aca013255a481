#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "d2t/data/record.hpp"

namespace d2t::data {

// Native format: one JSON object per line,
//   {"id": "...", "records": [[f1, ..., fL], ...], "summary": ["tok", ...]}
void write_jsonl(std::ostream& out, const std::vector<GameInstance>& games);
std::vector<GameInstance> read_jsonl(std::istream& in, const RecordSchema& schema);
void save_jsonl(const std::filesystem::path& path, const std::vector<GameInstance>& games);
std::vector<GameInstance> load_jsonl(const std::filesystem::path& path, const RecordSchema& schema);

// Dataset directory: train.jsonl, dev.jsonl, test.jsonl and schema.txt.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

// RotoWire-style JSON array of games. Each game has "box_score" (column ->
// {row index -> cell}), "home_line"/"vis_line" (type -> cell), "home_name",
// "vis_name", optional "home_city"/"vis_city", and "summary" (token list or
// raw text). Row identity columns (PLAYER_NAME, TEAM_CITY, TEAM, H/V) are
// not records; every other non-empty, non-"N/A" cell is one. Home/away comes
// from H/V when present, else TEAM_CITY vs home_city, else TEAM vs home_name.
// Records are ordered home players, home line, away players, away line.
// For mlb6 the box records get "-1" inning/play features and an optional
// "plays" array of {"inning", "batter", "event"} appends one valueless
// event record per play (type "<event>-batter", e.g. "home-run-batter").
// An explicit game "id" is used when present, else id_prefix + index.
std::vector<GameInstance> parse_rotowire_json(const std::string& text, const RecordSchema& schema,
                                              const std::string& id_prefix);
std::vector<GameInstance> load_rotowire_json(const std::filesystem::path& path,
                                             const RecordSchema& schema);

}  // namespace d2t::data
