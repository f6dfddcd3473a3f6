// Copyright 2026 The darksim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "darksim/error.hpp"
#include "darksim/harness.hpp"

namespace darksim {

void ResultSeries::validate() const {
    if (columns.empty()) throw Error(Errc::DimMismatch, "result series has no columns");
    for (const auto& r : rows)
        if (r.size() != columns.size()) throw Error(Errc::DimMismatch, "result series is not rectangular");
    if (columns.front() == "time_s")
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (!(rows[i][0] > rows[i - 1][0]))
                throw Error(Errc::InvalidValue, "result series time column is not strictly increasing");
}

void write_csv(const ResultSeries& rs, std::ostream& os) {
    rs.validate();
    for (const auto& m : rs.metadata) os << "# " << m << "\n";
    for (std::size_t c = 0; c < rs.columns.size(); ++c) os << (c ? "," : "") << rs.columns[c];
    os << "\n";
    char buf[40];
    for (const auto& r : rs.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            // keep -0 and 0 identical across runs
            const double v = r[c] == 0.0 ? 0.0 : r[c];
            std::snprintf(buf, sizeof buf, "%.12g", v);
            if (c) os << ',';
            os << buf;
        }
        os << "\n";
    }
    if (!os) throw Error(Errc::Io, "write_csv: stream error");
}

void write_csv(const ResultSeries& rs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "write_csv: cannot open '" + path + "'");
    write_csv(rs, out);
    out.close();
    if (!out) throw Error(Errc::Io, "write_csv: failed writing '" + path + "'");
}

}  // namespace darksim
