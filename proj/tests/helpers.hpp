#pragma once

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rldt/qtable.hpp"
#include "rldt/schema.hpp"

namespace rldt::test {

inline FeatureSchema binary_schema(int d, int k = 2) {
  std::vector<Feature> fs;
  for (int j = 0; j < d; ++j) fs.push_back({"x" + std::to_string(j), 2, {}});
  return FeatureSchema(fs, k);
}

// (state key, action) -> update count, read back from the dump.
inline std::map<std::pair<std::string, std::string>, long> counts(const QTable& q) {
  std::ostringstream out;
  q.write(out);
  std::istringstream in(out.str());
  std::map<std::pair<std::string, std::string>, long> result;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string key, action, value, count;
    std::getline(row, key, '\t');
    std::getline(row, action, '\t');
    std::getline(row, value, '\t');
    std::getline(row, count, '\t');
    result[{key, action}] = std::stol(count);
  }
  return result;
}

}  // namespace rldt::test
