#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gbclab/divergence.hpp"
#include "gbclab/horizon.hpp"
#include "gbclab/mass.hpp"

namespace gbclab {

using Json = nlohmann::ordered_json;

/// Shortest round-trip text of a double ("nan", "inf", "-inf" for non-finite).
std::string format_number(double v);

/// Finite numbers as JSON numbers, non-finite ones as null.
Json json_number(double v);

Json to_json(const ExtrapolationResult& r);
Json to_json(const MassReport& r);
Json to_json(const HorizonReport& r);
Json to_json(const DecayReport& r);
Json to_json(const HorizonDivergenceReport& r);
Json to_json(const IdentityResidual& r);

/// RFC 4180 table preceded by the "# schema=1" comment line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes to a temporary file in the same directory and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace gbclab
