#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modalfeat {

// Fixed-length feature vector tagged with its extractor and the wall-clock
// time of the extraction call that produced it.
struct FeatureVector {
    std::string extractor;
    std::string dataset_id;
    std::string image_id;
    double extract_seconds = 0.0;
    std::vector<double> values;
};

// CSV row: dataset id, image id, extractor name, extraction seconds in
// scientific notation, then the feature values.
void write_feature_csv_row(std::ostream& os, const FeatureVector& fv);
void write_feature_csv(const std::string& path,
                       const std::vector<FeatureVector>& rows);

}  // namespace modalfeat
