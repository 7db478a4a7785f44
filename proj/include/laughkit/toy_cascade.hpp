#pragma once

#include "laughkit/cascade.hpp"

namespace laughkit {

// Built-in single-stage smile cascade for the 24x24 bright-band pattern the
// synthetic corpus stamps onto positive frames. Both stumps respond to a
// horizontal light stripe across the window's middle third; the stage
// threshold requires both votes, so flat or noisy patches are rejected
// (each feature's weighted areas cancel, giving 0 on uniform input).
inline const char* toy_smile_cascade_xml() {
    return R"(<?xml version="1.0"?>
<opencv_storage>
<!-- stripe-band smile model: center band brighter than top+bottom thirds -->
<cascade type_id="opencv-cascade-classifier">
  <stageType>BOOST</stageType>
  <featureType>HAAR</featureType>
  <height>24</height>
  <width>24</width>
  <stageParams>
    <maxWeakCount>2</maxWeakCount></stageParams>
  <featureParams>
    <maxCatCount>0</maxCatCount></featureParams>
  <stageNum>1</stageNum>
  <stages>
    <_>
      <maxWeakCount>2</maxWeakCount>
      <stageThreshold>1.</stageThreshold>
      <weakClassifiers>
        <_>
          <internalNodes>0 -1 0 6.0000000000000002e-01</internalNodes>
          <leafValues>-1. 1.</leafValues></_>
        <_>
          <internalNodes>0 -1 1 2.9999999999999999e-01</internalNodes>
          <leafValues>-1. 1.</leafValues></_></weakClassifiers></_></stages>
  <features>
    <_>
      <rects>
        <_>2 0 20 24 -1.</_>
        <_>2 8 20 8 3.</_></rects></_>
    <_>
      <rects>
        <_>2 0 20 16 -1.</_>
        <_>2 8 20 8 2.</_></rects></_></features>
</cascade>
</opencv_storage>
)";
}

inline CascadeModel toy_smile_cascade() {
    return parse_cascade_xml(toy_smile_cascade_xml());
}

} // namespace laughkit
