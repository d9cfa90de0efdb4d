#ifndef PLANESDF_PLANESDF_HPP
#define PLANESDF_PLANESDF_HPP

// Umbrella header for the planesdf library.

#include "planesdf/change2d.hpp"
#include "planesdf/config.hpp"
#include "planesdf/connected_components.hpp"
#include "planesdf/errors.hpp"
#include "planesdf/evaluation.hpp"
#include "planesdf/geometry.hpp"
#include "planesdf/grid.hpp"
#include "planesdf/io.hpp"
#include "planesdf/pipeline.hpp"
#include "planesdf/plane_detection.hpp"
#include "planesdf/plane_sdf.hpp"
#include "planesdf/point_cloud.hpp"
#include "planesdf/random.hpp"
#include "planesdf/registration.hpp"
#include "planesdf/sym3eig.hpp"
#include "planesdf/synthetic.hpp"
#include "planesdf/validate3d.hpp"

#endif  // PLANESDF_PLANESDF_HPP
