#include "rldt/qtable.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rldt {

QTable::QTable(QTableLayout layout) : layout_(layout) {
  if (layout_.num_features < 0 || layout_.num_classes < 1 || layout_.max_queries < 0) {
    throw std::invalid_argument("qtable: bad layout");
  }
}

void QTable::check_allowed(const State& s, Action a) const {
  if (a.is_report()) {
    if (a.index() < 0 || a.index() >= layout_.num_classes) {
      throw std::logic_error("qtable: report index out of range");
    }
    return;
  }
  if (a.index() < 0 || a.index() >= layout_.num_features) {
    throw std::logic_error("qtable: query index out of range");
  }
  if (static_cast<int>(s.depth()) >= layout_.max_queries) {
    throw std::logic_error("qtable: query at depth limit for state '" + s.key() + "'");
  }
  if (s.knows(a.index())) {
    throw std::logic_error("qtable: query of known feature " + std::to_string(a.index()) +
                           " at state '" + s.key() + "'");
  }
}

double QTable::default_for(Action a) const {
  return a.is_query() ? layout_.q_optimistic : layout_.r_init;
}

double QTable::get(const State& s, Action a) const {
  check_allowed(s, a);
  auto it = rows_.find(s);
  if (it == rows_.end()) return default_for(a);
  const int slot = a.slot(layout_.num_features);
  return it->second.count[slot] ? it->second.value[slot] : default_for(a);
}

std::uint32_t QTable::update_count(const State& s, Action a) const {
  check_allowed(s, a);
  auto it = rows_.find(s);
  return it == rows_.end() ? 0 : it->second.count[a.slot(layout_.num_features)];
}

std::pair<Action, double> QTable::max(const State& s, std::span<const Action> allowed) const {
  if (allowed.empty()) throw std::logic_error("qtable: max over no actions");
  auto it = rows_.find(s);
  const Row* row = it == rows_.end() ? nullptr : &it->second;
  std::optional<Action> best_action;
  double best_value = 0;
  int best_slot = 0;
  for (Action a : allowed) {
    check_allowed(s, a);
    const int slot = a.slot(layout_.num_features);
    const double v = row && row->count[slot] ? row->value[slot] : default_for(a);
    if (!best_action || v > best_value || (v == best_value && slot < best_slot)) {
      best_action = a;
      best_value = v;
      best_slot = slot;
    }
  }
  return {*best_action, best_value};
}

std::pair<Action, double> QTable::best(const State& s) const {
  auto it = rows_.find(s);
  const Row* row = it == rows_.end() ? nullptr : &it->second;
  const int d = layout_.num_features;
  int best_slot = -1;
  double best_value = 0;
  auto consider = [&](int slot, double fallback) {
    const double v = row && row->count[slot] ? row->value[slot] : fallback;
    if (best_slot < 0 || v > best_value) {
      best_slot = slot;
      best_value = v;
    }
  };
  if (static_cast<int>(s.depth()) < layout_.max_queries) {
    auto known = s.known();
    std::size_t k = 0;
    for (int j = 0; j < d; ++j) {
      if (k < known.size() && known[k].feature == j) {
        ++k;
        continue;
      }
      consider(j, layout_.q_optimistic);
    }
  }
  for (int c = 0; c < layout_.num_classes; ++c) consider(d + c, layout_.r_init);
  return {Action::from_slot(best_slot, d), best_value};
}

std::pair<Action, double> QTable::best_report(const State& s) const {
  auto it = rows_.find(s);
  const Row* row = it == rows_.end() ? nullptr : &it->second;
  const int d = layout_.num_features;
  int best_slot = -1;
  double best_value = 0;
  for (int c = 0; c < layout_.num_classes; ++c) {
    const int slot = d + c;
    const double v = row && row->count[slot] ? row->value[slot] : layout_.r_init;
    if (best_slot < 0 || v > best_value) {
      best_slot = slot;
      best_value = v;
    }
  }
  return {Action::from_slot(best_slot, d), best_value};
}

double QTable::update(const State& s, Action a, double target, double alpha) {
  check_allowed(s, a);
  auto [it, inserted] = rows_.try_emplace(s);
  Row& row = it->second;
  if (inserted) {
    row.value.assign(slots(), 0.0);
    row.count.assign(slots(), 0);
  }
  const int slot = a.slot(layout_.num_features);
  const double old = row.count[slot] ? row.value[slot] : default_for(a);
  if (row.count[slot] == 0) ++entries_;
  row.value[slot] = old + alpha * (target - old);
  ++row.count[slot];
  ++version_;
  return row.value[slot];
}

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_value(const std::string& s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("qtable dump: bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void QTable::write(std::ostream& out) const {
  out << "# rldt-qtable features=" << layout_.num_features << " classes=" << layout_.num_classes
      << " max_queries=" << layout_.max_queries
      << " q_optimistic=" << format_value(layout_.q_optimistic)
      << " r_init=" << format_value(layout_.r_init) << '\n';
  std::vector<std::pair<std::string, const Row*>> sorted;
  sorted.reserve(rows_.size());
  for (const auto& [state, row] : rows_) sorted.emplace_back(state.key(), &row);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [key, row] : sorted) {
    for (int slot = 0; slot < slots(); ++slot) {
      if (!row->count[slot]) continue;
      out << key << '\t' << Action::from_slot(slot, layout_.num_features).to_string() << '\t'
          << format_value(row->value[slot]) << '\t' << row->count[slot] << '\n';
    }
  }
}

QTable QTable::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# rldt-qtable", 0) != 0) {
    throw std::runtime_error("qtable dump: missing '# rldt-qtable' header");
  }
  QTableLayout layout;
  {
    std::istringstream fields(line.substr(13));
    std::string field;
    int seen = 0;
    while (fields >> field) {
      auto eq = field.find('=');
      if (eq == std::string::npos) throw std::runtime_error("qtable dump: bad header field");
      auto name = field.substr(0, eq);
      auto value = field.substr(eq + 1);
      if (name == "features") layout.num_features = static_cast<int>(parse_value(value));
      else if (name == "classes") layout.num_classes = static_cast<int>(parse_value(value));
      else if (name == "max_queries") layout.max_queries = static_cast<int>(parse_value(value));
      else if (name == "q_optimistic") layout.q_optimistic = parse_value(value);
      else if (name == "r_init") layout.r_init = parse_value(value);
      else throw std::runtime_error("qtable dump: unknown header field '" + name + "'");
      ++seen;
    }
    if (seen != 5) throw std::runtime_error("qtable dump: incomplete header");
  }
  QTable table(layout);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 4) {
      throw std::runtime_error("qtable dump: line " + std::to_string(lineno) + " has " +
                               std::to_string(cols.size()) + " fields");
    }
    try {
      const State s = State::parse(cols[0]);
      const Action a = Action::parse(cols[1]);
      const double value = parse_value(cols[2]);
      const double count = parse_value(cols[3]);
      if (count < 1 || count != static_cast<double>(static_cast<std::uint32_t>(count))) {
        throw std::runtime_error("bad update count");
      }
      table.check_allowed(s, a);
      auto [it, inserted] = table.rows_.try_emplace(s);
      Row& row = it->second;
      if (inserted) {
        row.value.assign(table.slots(), 0.0);
        row.count.assign(table.slots(), 0);
      }
      const int slot = a.slot(layout.num_features);
      if (row.count[slot]) throw std::runtime_error("duplicate entry");
      row.value[slot] = value;
      row.count[slot] = static_cast<std::uint32_t>(count);
      ++table.entries_;
      table.version_ += row.count[slot];
    } catch (const std::exception& e) {
      throw std::runtime_error("qtable dump: line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return table;
}

}  // namespace rldt
