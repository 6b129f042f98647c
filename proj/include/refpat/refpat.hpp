#pragma once

// Umbrella header: geometric refinement patterns for h-adaptive meshes.

#include "refpat/affine.hpp"
#include "refpat/io.hpp"
#include "refpat/mesh.hpp"
#include "refpat/pattern.hpp"
#include "refpat/pattern_db.hpp"
#include "refpat/ref_tools.hpp"
#include "refpat/topology.hpp"
