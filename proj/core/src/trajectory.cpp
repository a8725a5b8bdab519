#include "smcsim/trajectory.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "smcsim/error.hpp"

namespace smcsim {

namespace {

constexpr const char* kTrailingChannels[] = {"ref", "e", "edot", "eint", "s", "u", "d"};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  return out;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    // from_chars rejects "inf"/"nan" spellings produced by other tools.
    try {
      std::size_t pos = 0;
      value = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw IoError("bad number in CSV: '" + text + "'");
    }
  }
  return value;
}

}  // namespace

void Trajectory::reserve(std::size_t n) {
  t.reserve(n);
  for (auto& c : state) c.reserve(n);
  for (auto* c : {&ref, &e, &e_dot, &e_int, &s, &u, &d}) c->reserve(n);
}

std::vector<std::string> Trajectory::channel_names() const {
  std::vector<std::string> names{"t"};
  names.insert(names.end(), state_names.begin(), state_names.end());
  for (const char* n : kTrailingChannels) names.emplace_back(n);
  return names;
}

std::span<const double> Trajectory::channel(std::string_view name) const {
  if (name == "t") return t;
  for (std::size_t i = 0; i < state_names.size(); ++i) {
    if (name == state_names[i]) return state[i];
  }
  if (name == "ref") return ref;
  if (name == "e") return e;
  if (name == "edot") return e_dot;
  if (name == "eint") return e_int;
  if (name == "s") return s;
  if (name == "u") return u;
  if (name == "d") return d;
  throw ConfigError("unknown trajectory channel '" + std::string(name) + "'");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_columns_csv(std::ostream& os, const std::vector<std::string>& comments,
                       const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns) {
  for (const auto& c : comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
  os << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      os << (c ? "," : "") << format_double(columns[c][r]);
    }
    os << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& comments) {
  const auto names = traj.channel_names();
  std::vector<std::span<const double>> columns;
  columns.reserve(names.size());
  for (const auto& n : names) columns.push_back(traj.channel(n));
  write_columns_csv(os, comments, names, columns);
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    header = split(line, ',');
    break;
  }
  constexpr std::size_t trailing = std::size(kTrailingChannels);
  if (header.size() < 2 + trailing || header.front() != "t") {
    throw IoError("not a trajectory CSV (header must be t,state...,ref,e,edot,eint,s,u,d)");
  }
  for (std::size_t i = 0; i < trailing; ++i) {
    if (header[header.size() - trailing + i] != kTrailingChannels[i]) {
      throw IoError("trajectory CSV header has unexpected trailing channels");
    }
  }

  Trajectory traj;
  const std::size_t n_state = header.size() - 1 - trailing;
  traj.state_names.assign(header.begin() + 1, header.begin() + 1 + static_cast<long>(n_state));
  traj.state.resize(n_state);
  std::vector<std::vector<double>*> cols{&traj.t};
  for (auto& c : traj.state) cols.push_back(&c);
  for (auto* c : {&traj.ref, &traj.e, &traj.e_dot, &traj.e_int, &traj.s, &traj.u, &traj.d}) {
    cols.push_back(c);
  }

  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() != cols.size()) throw IoError("ragged trajectory CSV row");
    for (std::size_t i = 0; i < cells.size(); ++i) cols[i]->push_back(parse_double(cells[i]));
  }
  return traj;
}

}  // namespace smcsim
