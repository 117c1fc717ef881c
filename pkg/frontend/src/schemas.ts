/**
 * Zod schemas mirroring the compute service's request and response shapes.
 * Every outbound request body is validated against these before it leaves
 * the client, mirroring the server-side rules.
 */
import { z } from "zod";

export const ROTATIONS = [0, 90, 180, 270] as const;

export const FAMILY_PARAM_COUNT: Record<string, number> = {
  independence: 0,
  gaussian: 1,
  student_t: 2,
  clayton: 1,
  gumbel: 1,
  frank: 1,
  joe: 1,
  bb1: 2,
  bb6: 2,
  bb8: 2,
  tawn1: 2,
  tawn2: 2,
  amh: 1,
};

export const CopulaSchema = z
  .object({
    family: z.string(),
    rotation: z.union([z.literal(0), z.literal(90), z.literal(180), z.literal(270)]).default(0),
    params: z.array(z.number()).default([]),
  })
  .refine((c) => c.family in FAMILY_PARAM_COUNT, { message: "unknown family" })
  .refine((c) => c.params.length === FAMILY_PARAM_COUNT[c.family], {
    message: "wrong parameter count for family",
  });

export const ParamFnSchema = z
  .object({
    form: z.enum([
      "constant",
      "sine",
      "quadratic",
      "exp_saturation",
      "arctan",
      "sign_cosine",
      "linear",
      "piecewise_linear",
    ]),
    coeffs: z.array(z.number()),
    knots: z.array(z.number()).optional(),
    scale: z.enum(["identity", "fisher_z", "log"]).optional(),
  })
  .refine(
    (f) => {
      const arity: Record<string, number> = {
        constant: 1,
        sine: 1,
        quadratic: 3,
        exp_saturation: 1,
        arctan: 3,
        sign_cosine: 3,
        linear: 2,
      };
      if (f.form === "piecewise_linear") {
        return f.knots !== undefined && f.knots.length === f.coeffs.length;
      }
      return f.coeffs.length === arity[f.form];
    },
    { message: "coefficient count does not match the form" },
  );

export const CondPairSchema = z.object({
  family: z.string(),
  base_rotation: z.union([z.literal(0), z.literal(90), z.literal(180), z.literal(270)]).default(0),
  param_fns: z.array(ParamFnSchema),
  sign_rotation: z
    .union([z.literal(0), z.literal(90), z.literal(180), z.literal(270)])
    .nullish(),
});

export const VineSpecSchema = z.object({
  margins: z.enum(["uniform", "std_normal"]).default("std_normal"),
  c12: CopulaSchema,
  c23: CopulaSchema,
  c13_2: CondPairSchema,
  order: z.array(z.number().int().min(1).max(3)).length(3).optional(),
});
export type VineSpec = z.infer<typeof VineSpecSchema>;

const ascendingPositive = (levels: number[]) =>
  levels.every((l, i) => l > 0 && (i === 0 || l > levels[i - 1]));

export const GridSchema = z.object({
  n: z.number().int().min(2).max(192).default(96),
  lo: z.number().default(-3),
  hi: z.number().default(3),
});

const specSource = { spec: VineSpecSchema.optional(), scenario: z.string().optional() };
const exactlyOneSource = (r: { spec?: unknown; scenario?: unknown }) =>
  (r.spec === undefined) !== (r.scenario === undefined);

export const MeshRequestSchema = z
  .object({
    ...specSource,
    grid: GridSchema.default({}),
    levels: z.array(z.number()).default([0.015, 0.035, 0.075, 0.11]),
  })
  .refine(exactlyOneSource, { message: "provide exactly one of spec or scenario" })
  .refine((r) => ascendingPositive(r.levels), { message: "levels must be positive ascending" });
export type MeshRequest = z.infer<typeof MeshRequestSchema>;

export const MarginsRequestSchema = z
  .object({
    ...specSource,
    pair: z.enum(["12", "23", "13"]).default("13"),
    grid: GridSchema.default({}),
    levels: z.array(z.number()).default([0.015, 0.035, 0.075, 0.11]),
  })
  .refine(exactlyOneSource, { message: "provide exactly one of spec or scenario" })
  .refine((r) => ascendingPositive(r.levels), { message: "levels must be positive ascending" });

export const TauCurveRequestSchema = z
  .object({ ...specSource, points: z.number().int().min(3).max(4096).default(101) })
  .refine(exactlyOneSource, { message: "provide exactly one of spec or scenario" });

export const ApproxRequestSchema = z
  .object({
    ...specSource,
    n: z.number().int().min(100).max(1_000_000).default(100_000),
    seed: z.number().int().default(0),
    background: z.boolean().default(false),
  })
  .refine(exactlyOneSource, { message: "provide exactly one of spec or scenario" });

// ---- responses -----------------------------------------------------------

export const MeshSchema = z.object({
  level: z.number(),
  vertices: z.array(z.array(z.number()).length(3)),
  normals: z.array(z.array(z.number()).length(3)),
  triangles: z.array(z.array(z.number().int()).length(3)),
});
export type Mesh = z.infer<typeof MeshSchema>;

export const MeshBundleSchema = z.object({
  levels: z.array(
    z.object({ level: z.number(), quantized: z.boolean(), mesh: MeshSchema }),
  ),
  grid: z.object({
    lo: z.array(z.number()),
    hi: z.array(z.number()),
    n: z.array(z.number().int()),
  }),
  spec: z.unknown(),
});
export type MeshBundle = z.infer<typeof MeshBundleSchema>;

export const ContourSetSchema = z.object({
  level: z.number(),
  polylines: z.array(z.array(z.array(z.number()).length(2))),
  closed: z.array(z.boolean()),
});

export const MarginsResponseSchema = z.object({
  pair: z.enum(["12", "23", "13"]),
  grid: z.object({
    lo: z.array(z.number()),
    hi: z.array(z.number()),
    n: z.array(z.number().int()),
  }),
  contours: z.array(ContourSetSchema),
});
export type MarginsResponse = z.infer<typeof MarginsResponseSchema>;

export const TauCurveResponseSchema = z.object({
  u2: z.array(z.number()),
  tau: z.array(z.number()),
});
export type TauCurveResponse = z.infer<typeof TauCurveResponseSchema>;

export const ScenarioListSchema = z.array(
  z.object({ id: z.string(), description: z.string(), spec: VineSpecSchema }),
);
export type ScenarioList = z.infer<typeof ScenarioListSchema>;

export const FamilyMetaSchema = z.array(
  z.object({
    family: z.string(),
    n_params: z.number().int(),
    params: z.array(
      z.object({
        name: z.string(),
        min: z.number().nullable(),
        max: z.number().nullable(),
        min_inclusive: z.boolean(),
        max_inclusive: z.boolean(),
      }),
    ),
    rotations: z.array(z.number().int()),
    tau_invertible: z.boolean(),
  }),
);
export type FamilyMeta = z.infer<typeof FamilyMetaSchema>;

export const ApproxResponseSchema = z.object({
  spec: VineSpecSchema,
  conditional: z.object({
    family: z.string(),
    rotation: z.number().int(),
    params: z.array(z.number()),
    tau: z.number(),
  }),
  n: z.number().int(),
  seed: z.number().int(),
});
export type ApproxResponse = z.infer<typeof ApproxResponseSchema>;

export const JobStatusSchema = z.object({
  status: z.enum(["pending", "running", "done", "error"]),
  progress: z.number(),
  result: z.unknown().nullable(),
  error: z.string().nullable(),
});
