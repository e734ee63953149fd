#ifndef GLANDTOPO_GLANDTOPO_HPP
#define GLANDTOPO_GLANDTOPO_HPP

#include "glandtopo/augment.hpp"
#include "glandtopo/corpus.hpp"
#include "glandtopo/distance.hpp"
#include "glandtopo/error.hpp"
#include "glandtopo/io.hpp"
#include "glandtopo/losses.hpp"
#include "glandtopo/metrics.hpp"
#include "glandtopo/morphology.hpp"
#include "glandtopo/netspec.hpp"
#include "glandtopo/parallel.hpp"
#include "glandtopo/patching.hpp"
#include "glandtopo/postprocess.hpp"
#include "glandtopo/raster.hpp"
#include "glandtopo/render.hpp"
#include "glandtopo/rng.hpp"
#include "glandtopo/synth.hpp"
#include "glandtopo/topo_gt.hpp"
#include "glandtopo/watershed.hpp"

#endif  // GLANDTOPO_GLANDTOPO_HPP
