#pragma once

#include <iosfwd>
#include <vector>

#include "wavedens/config.hpp"
#include "wavedens/theory_checks.hpp"

namespace wavedens {

// Rows for every check enabled in config.theory, in a fixed order.
std::vector<CheckRow> RunTheorySuite(const Config& config);

// Gram orthonormality, Parseval and zero-mean checks for each configured S.
std::vector<CheckRow> RunBasisChecks(const Config& config);

// Header "check,parameters,value,pass".
void WriteCheckCsv(std::ostream& out, const std::vector<CheckRow>& rows);

bool AllPass(const std::vector<CheckRow>& rows);

}  // namespace wavedens
