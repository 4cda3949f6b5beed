"""Fragile block watermarking for 8-bit grayscale images.

An image is cut into equal rectangular blocks; within each block every pixel
except one spare is treated as a ring element of prime size N and replaced by
its signature under a shared binary key.  Verification runs per block and uses
only the public key, so any later change to a signed pixel breaks exactly the
block that contains it: tampering is localized at block resolution.

Rasters travel as binary PGM (P5); verification maps as binary PBM (P4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Tuple

import numpy as np

from .rings import (
    CycloElement,
    RingElement,
    forward_transform,
    is_odd_prime,
    perp_norm,
    perp_norm_exact,
    quotient_map,
)
from .signature import (
    DEFAULT_QUANTIZER,
    SigningError,
    hash_to_element,
    sign,
    verify,
)

__all__ = [
    "BlockPlan",
    "ForgeReport",
    "GrayImage",
    "SignStats",
    "default_plan",
    "forge_demo",
    "read_pbm",
    "read_pgm",
    "rescale_range",
    "verification_summary",
    "watermark_sign",
    "watermark_sign_with_stats",
    "watermark_verify",
    "write_pbm",
    "write_pgm",
]


# ---------------------------------------------------------------------------
# pixel containers


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale raster; `pixels` is a read-only (height, width) array."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape != (self.height, self.width):
            raise ValueError("pixel array must have shape (height, width)")
        if px.dtype != np.uint8:
            if not np.issubdtype(px.dtype, np.integer):
                raise TypeError("pixels must be integers; use from_array to round")
            if px.size and (int(px.min()) < 0 or int(px.max()) > 255):
                raise ValueError("pixel values outside the 8-bit range")
            px = px.astype(np.uint8)
        else:
            px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_array(cls, arr) -> "GrayImage":
        """Round and clip an arbitrary 2-d array into an 8-bit image."""
        a = np.asarray(arr, dtype=float)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        px = np.clip(np.floor(a + 0.5), 0, 255).astype(np.uint8)
        return cls(width=px.shape[1], height=px.shape[0], pixels=px)


@dataclass(frozen=True)
class BlockPlan:
    """Partition geometry: blocks of block_h x block_w pixels, one spare each.

    Pixels inside a block are traversed row-major; the spare pixel sits at
    `spare_index` in that order (default: last position) and is never signed
    or read back.  The remaining count n = block_w*block_h - 1 must be an odd
    prime, since it becomes the ring size.
    """

    block_w: int
    block_h: int
    n: int = 0
    spare_index: int = -1

    def __post_init__(self):
        if self.block_w < 1 or self.block_h < 1:
            raise ValueError("block dimensions must be positive")
        size = self.block_w * self.block_h
        if self.n == 0:
            object.__setattr__(self, "n", size - 1)
        if self.spare_index < 0:
            object.__setattr__(self, "spare_index", size - 1)
        if self.n != size - 1:
            raise ValueError("n must equal block_w*block_h - 1")
        if not 0 <= self.spare_index < size:
            raise ValueError("spare index outside the block")
        if not is_odd_prime(self.n):
            raise ValueError("block pixel count minus one must be an odd prime")

    def grid(self, img: GrayImage) -> Tuple[int, int]:
        """Block rows/cols covering `img`; image dims must divide exactly."""
        if img.height % self.block_h or img.width % self.block_w:
            raise ValueError("image dimensions not divisible by the block size")
        return img.height // self.block_h, img.width // self.block_w


def default_plan() -> BlockPlan:
    """19x20-pixel blocks: 380 pixels, ring size N = 379, spare at the end."""
    return BlockPlan(block_w=20, block_h=19)


# ---------------------------------------------------------------------------
# netpbm plumbing


def _tokens(data: bytes) -> Iterator[Tuple[bytes, int]]:
    # whitespace-separated header tokens with '#' comments; yields the token
    # and the offset one past its end, so the caller can locate the raster
    i, size = 0, len(data)
    while i < size:
        c = data[i:i + 1]
        if c in (b" ", b"\t", b"\r", b"\n"):
            i += 1
        elif c == b"#":
            while i < size and data[i:i + 1] not in (b"\r", b"\n"):
                i += 1
        else:
            j = i
            while j < size and data[j:j + 1] not in (b" ", b"\t", b"\r", b"\n", b"#"):
                j += 1
            yield data[i:j], j
            i = j


def read_pgm(data: bytes) -> GrayImage:
    """Parse a binary (P5) PGM stream with a single-byte maxval."""
    toks = _tokens(data)
    try:
        magic, _ = next(toks)
        if magic != b"P5":
            raise ValueError("not a binary PGM (P5) stream")
        (w_b, _), (h_b, _), (m_b, end) = next(toks), next(toks), next(toks)
    except StopIteration:
        raise ValueError("truncated PGM header") from None
    width, height, maxval = int(w_b), int(h_b), int(m_b)
    if width < 1 or height < 1:
        raise ValueError("bad PGM dimensions")
    if not 0 < maxval <= 255:
        raise ValueError("only single-byte PGM rasters are supported")
    # exactly one whitespace byte separates the maxval from the raster
    raster = data[end + 1:end + 1 + width * height]
    if len(raster) < width * height:
        raise ValueError("PGM raster shorter than the header promises")
    px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return GrayImage(width=width, height=height, pixels=px)


def write_pgm(img: GrayImage) -> bytes:
    header = ("P5\n%d %d\n255\n" % (img.width, img.height)).encode("ascii")
    return header + img.pixels.tobytes()


def write_pbm(mask) -> bytes:
    """Pack a 2-d boolean mask as binary PBM (P4); True bits render black."""
    m = np.asarray(mask, dtype=bool)
    if m.ndim != 2:
        raise ValueError("expected a 2-d mask")
    header = ("P4\n%d %d\n" % (m.shape[1], m.shape[0])).encode("ascii")
    return header + np.packbits(m, axis=1).tobytes()


def read_pbm(data: bytes) -> np.ndarray:
    toks = _tokens(data)
    try:
        magic, _ = next(toks)
        if magic != b"P4":
            raise ValueError("not a binary PBM (P4) stream")
        (w_b, _), (h_b, end) = next(toks), next(toks)
    except StopIteration:
        raise ValueError("truncated PBM header") from None
    width, height = int(w_b), int(h_b)
    if width < 1 or height < 1:
        raise ValueError("bad PBM dimensions")
    stride = (width + 7) // 8
    raster = data[end + 1:end + 1 + stride * height]
    if len(raster) < stride * height:
        raise ValueError("PBM raster shorter than the header promises")
    rows = np.frombuffer(raster, dtype=np.uint8).reshape(height, stride)
    return np.unpackbits(rows, axis=1)[:, :width].astype(bool)


# ---------------------------------------------------------------------------
# range conditioning


def rescale_range(img: GrayImage, lo: int = 5, hi: int = 250) -> GrayImage:
    """Affinely map the image's [min, max] pixel values onto [lo, hi].

    Signing perturbs every pixel by a few grey levels, so the raster needs
    headroom at both ends of the 8-bit range to keep clamping rare.  A
    constant image maps to the rounded midpoint.
    """
    if not 0 <= lo < hi <= 255:
        raise ValueError("need 0 <= lo < hi <= 255")
    p = img.pixels.astype(float)
    pmin, pmax = float(p.min()), float(p.max())
    if pmin == pmax:
        out = np.full(p.shape, int(math.floor((lo + hi) / 2 + 0.5)), dtype=np.uint8)
    else:
        scaled = lo + (p - pmin) * ((hi - lo) / (pmax - pmin))
        out = np.floor(scaled + 0.5).astype(np.uint8)
    return GrayImage(width=img.width, height=img.height, pixels=out)


# ---------------------------------------------------------------------------
# signing


@dataclass(frozen=True)
class SignStats:
    blocks: int
    clamped_pixels: int
    amplified_blocks: int
    fallback_blocks: int
    rms_change: float


def _block_view(pixels: np.ndarray, plan: BlockPlan, r: int, c: int) -> np.ndarray:
    return pixels[r * plan.block_h:(r + 1) * plan.block_h,
                  c * plan.block_w:(c + 1) * plan.block_w]


def _fallback_factor(seed_bytes: bytes, n: int) -> CycloElement:
    # deterministic binary factor for blocks whose quotient content vanishes;
    # a hash-derived bit pattern is exactly what the half-offset quantizer
    # would emit on low-contrast noise
    bound = Fraction(n, 4) - Fraction(math.sqrt(n))
    for attempt in range(64):
        tag = seed_bytes + b"/flat-block/" + attempt.to_bytes(4, "big")
        g = quotient_map(hash_to_element(tag, n, m=2))
        if any(int(x) for x in g.coeffs.tolist()) and perp_norm_exact(g) > bound:
            return g
    raise SigningError("could not derive a usable factor for a flat block")


def watermark_sign_with_stats(img: GrayImage, plan: BlockPlan, key,
                              quantizer: str = DEFAULT_QUANTIZER):
    """Sign every block of `img`; returns (signed image, SignStats).

    Each block's non-spare pixels, read row-major, form the data element.
    Signed values landing outside [0, 255] are clamped and counted -- a
    clamped block will no longer verify, so the counter should stay at zero
    on properly rescaled input.  Exactly-flat blocks fall back to a factor
    derived by hashing the block content, keeping the output deterministic.
    """
    rows, cols = plan.grid(img)
    size = plan.block_w * plan.block_h
    keep = np.arange(size) != plan.spare_index
    out = img.pixels.copy()
    clamped = amplified = fallback = 0
    sq_sum, sq_count = 0.0, 0
    for r in range(rows):
        for c in range(cols):
            flat = _block_view(img.pixels, plan, r, c).reshape(-1)
            vals = flat[keep].astype(float)
            rho = RingElement(vals, domain="real")
            try:
                s = sign(rho, key, quantizer=quantizer)
            except SigningError:
                s = sign(rho, key, quantizer=quantizer,
                         factor=_fallback_factor(flat.tobytes(), plan.n))
                fallback += 1
            if s.amplifications:
                amplified += 1
            signed = np.asarray([int(x) for x in s.data.coeffs], dtype=np.int64)
            clamped += int(np.count_nonzero((signed < 0) | (signed > 255)))
            signed = np.clip(signed, 0, 255)
            sq_sum += float(np.sum((signed - vals) ** 2))
            sq_count += signed.size
            new_flat = flat.copy()
            new_flat[keep] = signed.astype(np.uint8)
            _block_view(out, plan, r, c)[:, :] = new_flat.reshape(
                plan.block_h, plan.block_w)
    stats = SignStats(
        blocks=rows * cols,
        clamped_pixels=clamped,
        amplified_blocks=amplified,
        fallback_blocks=fallback,
        rms_change=math.sqrt(sq_sum / sq_count),
    )
    return GrayImage(width=img.width, height=img.height, pixels=out), stats


def watermark_sign(img: GrayImage, plan: BlockPlan, key,
                   quantizer: str = DEFAULT_QUANTIZER) -> GrayImage:
    signed, _ = watermark_sign_with_stats(img, plan, key, quantizer)
    return signed


# ---------------------------------------------------------------------------
# verification


def watermark_verify(img: GrayImage, plan: BlockPlan, alpha: CycloElement,
                     tolerance: float = 1e-2) -> np.ndarray:
    """Per-block check against the public key; True entries verified.

    Only the divisibility half of verification applies: once a watermark is
    embedded the original data no longer exists, so there is no distance
    test.  Returns a (block_rows, block_cols) boolean grid.
    """
    if not isinstance(alpha, CycloElement) or alpha.n != plan.n:
        raise ValueError("public key size does not match the block plan")
    rows, cols = plan.grid(img)
    size = plan.block_w * plan.block_h
    keep = np.arange(size) != plan.spare_index
    grid = np.zeros((rows, cols), dtype=bool)
    for r in range(rows):
        for c in range(cols):
            flat = _block_view(img.pixels, plan, r, c).reshape(-1)
            rho = RingElement(flat[keep].astype(float), domain="real")
            grid[r, c] = bool(verify(rho, alpha, tolerance=tolerance))
    return grid


def verification_summary(grid) -> str:
    """One-line report: total blocks, failed count, then row:col per failure."""
    g = np.asarray(grid, dtype=bool)
    fails = np.argwhere(~g)
    parts = [str(g.size), str(len(fails))]
    parts.extend("%d:%d" % (r, c) for r, c in fails)
    return ",".join(parts)


# ---------------------------------------------------------------------------
# counterfeiting demonstration


@dataclass(frozen=True)
class ForgeReport:
    block_row: int
    block_col: int
    counterfeit_norm: float
    key_norm_estimate: float
    predicted_factor: float
    predicted_rms: float
    rescale_lo: int
    rescale_hi: int
    measured_rms: float
    clamped_pixels: int
    blocks_passing: int
    blocks: int


def forge_demo(signed_img: GrayImage, plan: BlockPlan, alpha: CycloElement,
               tolerance: float = 1e-2):
    """Forge a watermark from public data alone; returns (image, ForgeReport).

    Every signed block lies in the secret key's ideal, so the attacker lifts
    the block with the smallest perp norm -- found where image contrast is
    low -- and uses it as a substitute key.  Data signed with it still passes
    the divisibility challenge, but its quantization error grows like the
    square root of the norm ratio, which is what gives the forgery away.  The
    source range is compressed first so the inflated noise still fits in
    8 bits; the report pairs the predicted noise factor with the measured RMS.
    """
    if not watermark_verify(signed_img, plan, alpha, tolerance).all():
        raise ValueError("input image does not carry a valid watermark")
    rows, cols = plan.grid(signed_img)
    n = plan.n
    size = plan.block_w * plan.block_h
    keep = np.arange(size) != plan.spare_index

    best = None
    for r in range(rows):
        for c in range(cols):
            flat = _block_view(signed_img.pixels, plan, r, c).reshape(-1)
            el = RingElement(flat[keep].astype(np.int64), domain="integer")
            pn = perp_norm(el)
            if best is None or pn < best[0]:
                best = (pn, r, c, quotient_map(el))
    counterfeit_norm, block_r, block_c, counterfeit = best

    key_norm = float(np.sum(forward_transform(alpha).sigma.real)) / n
    predicted_factor = math.sqrt(counterfeit_norm / key_norm)
    predicted_rms = math.sqrt((n / 12.0) * counterfeit_norm / (n - 1) + 1.0 / 12.0)

    # compress until the inflated signing noise fits the 8-bit range with a
    # margin; clamped pixels would break their block's divisibility
    margin = int(math.ceil(4.0 * predicted_rms))
    forged = stats = None
    for _ in range(6):
        if 2 * margin >= 250:
            raise RuntimeError("counterfeit noise exceeds the 8-bit range")
        source = rescale_range(signed_img, margin, 255 - margin)
        forged, stats = watermark_sign_with_stats(source, plan, counterfeit)
        if stats.clamped_pixels == 0:
            break
        margin = int(math.ceil(margin * 1.5))
    if stats is None or stats.clamped_pixels:
        raise RuntimeError("could not absorb the counterfeit noise by rescaling")

    passing = int(watermark_verify(forged, plan, alpha, tolerance).sum())
    report = ForgeReport(
        block_row=block_r,
        block_col=block_c,
        counterfeit_norm=counterfeit_norm,
        key_norm_estimate=key_norm,
        predicted_factor=predicted_factor,
        predicted_rms=predicted_rms,
        rescale_lo=margin,
        rescale_hi=255 - margin,
        measured_rms=stats.rms_change,
        clamped_pixels=stats.clamped_pixels,
        blocks_passing=passing,
        blocks=stats.blocks,
    )
    return forged, report
