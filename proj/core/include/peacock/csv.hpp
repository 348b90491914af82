#pragma once

#include <string>
#include <vector>

namespace peacock {

// Deterministic float formatting for CSV artifacts: %.17g round-trips doubles
// and is locale-independent, so identical runs produce byte-identical files.
std::string fmt17(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace peacock
