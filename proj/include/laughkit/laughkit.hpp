#pragma once

#include "laughkit/acoustics.hpp"
#include "laughkit/cascade.hpp"
#include "laughkit/config.hpp"
#include "laughkit/detect.hpp"
#include "laughkit/error.hpp"
#include "laughkit/fft.hpp"
#include "laughkit/fusion.hpp"
#include "laughkit/image_io.hpp"
#include "laughkit/integral_image.hpp"
#include "laughkit/manifest.hpp"
#include "laughkit/metrics.hpp"
#include "laughkit/mfcc.hpp"
#include "laughkit/net.hpp"
#include "laughkit/pipeline.hpp"
#include "laughkit/rng.hpp"
#include "laughkit/synth.hpp"
#include "laughkit/toy_cascade.hpp"
#include "laughkit/types.hpp"
#include "laughkit/wav.hpp"
