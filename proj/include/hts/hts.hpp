#pragma once
// Umbrella header.

#include "hts/blob.hpp"
#include "hts/corpus.hpp"
#include "hts/error.hpp"
#include "hts/foliation.hpp"
#include "hts/geodesics.hpp"
#include "hts/geometry.hpp"
#include "hts/modulus.hpp"
#include "hts/qc_maps.hpp"
#include "hts/semismooth.hpp"
#include "hts/surface.hpp"
#include "hts/surface_io.hpp"
#include "hts/surgery.hpp"
#include "hts/svg.hpp"
