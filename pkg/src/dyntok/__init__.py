"""Parameter-free dynamic visual-token merging for image and video token tensors."""

from dyntok.dpc import (
    ClusterResult,
    DensityProfile,
    FeatureSet,
    assign_to_centers,
    cluster,
    default_k,
    density_profile,
    distance_index,
    local_density,
    select_centers,
)
from dyntok.errors import (
    DegenerateInputError,
    DyntokError,
    MetaMissingError,
    TensorDtypeError,
    TensorFormatError,
    TensorLengthError,
    ValidationError,
)
from dyntok.multiscale import (
    MultiScaleRep,
    Projection,
    apply_projection,
    load_projection,
    multiscale_image,
    multiscale_video,
)
from dyntok.spatial import GridToken, MergedImage, grid_init, merge_step, region_map
from dyntok.temporal import (
    EventSegmentation,
    EventTokens,
    FrameSequence,
    event_tokens,
    frame_pool,
    merge_within_event,
    segment_events,
)
from dyntok.tensor_io import TensorFile, TokenMeta, read_meta, read_tensor, write_meta, write_tensor

__version__ = "0.1.0"
