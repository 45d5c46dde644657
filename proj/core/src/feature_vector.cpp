#include "modalfeat/feature_vector.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace modalfeat {

void write_feature_csv_row(std::ostream& os, const FeatureVector& fv) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6e", fv.extract_seconds);
    os << fv.dataset_id << ',' << fv.image_id << ',' << fv.extractor << ','
       << buf;
    for (double v : fv.values) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << ',' << buf;
    }
    os << '\n';
}

void write_feature_csv(const std::string& path,
                       const std::vector<FeatureVector>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open feature csv for write: " + path);
    for (const auto& row : rows) write_feature_csv_row(os, row);
}

}  // namespace modalfeat
