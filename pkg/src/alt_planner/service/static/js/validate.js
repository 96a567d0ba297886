/** Parse "0.5, 1.0" style vector text; null when anything is not a number. */
export function parseVector(text) {
    const parts = text.split(/[,\s]+/).filter((p) => p.length > 0);
    if (parts.length === 0)
        return null;
    const values = parts.map(Number);
    return values.every(Number.isFinite) ? values : null;
}
// Client-side mirror of the service's create-session 400 rules, so the
// wizard can refuse a doomed submit before the round trip.
export function validateSetup(form) {
    const errors = {};
    if (form.materials.length === 0) {
        errors.materials = "add at least one material";
    }
    else {
        const encodings = form.materials.map((m) => parseVector(m.encoding));
        if (encodings.some((e) => e === null)) {
            errors.materials = "every encoding must be a list of numbers";
        }
        else {
            const vecs = encodings;
            const lengths = new Set(vecs.map((v) => v.length));
            if (lengths.size !== 1) {
                errors.materials = "material encodings must all have the same length";
            }
            else if (new Set(vecs.map((v) => v.join(","))).size !== vecs.length) {
                errors.materials = "material encodings must be distinct";
            }
        }
        if (form.materials.some((m) => m.label.trim().length === 0)) {
            errors.material_labels = "every material needs a name";
        }
    }
    const target = parseVector(form.targetStress);
    if (target === null) {
        errors.target_stress = "target stress must be a list of numbers";
    }
    if (form.stresses.length === 0) {
        errors.stresses = "add at least one stress combination";
    }
    else {
        const stresses = form.stresses.map(parseVector);
        if (stresses.some((v) => v === null)) {
            errors.stresses = "every stress row must be a list of numbers";
        }
        else if (target !== null &&
            stresses.some((v) => v.length !== target.length)) {
            errors.stresses = "stress rows must match the target stress length";
        }
    }
    const noiseVar = Number(form.noiseVar);
    if (!Number.isFinite(noiseVar) || !(noiseVar > 0)) {
        errors.noise_var = "noise variance must be a number > 0";
    }
    const tau = Number(form.tau);
    if (!Number.isFinite(tau) || !(tau > 0)) {
        errors.tau = "tau must be a number > 0";
    }
    if (form.policy === "factorial") {
        const n = Number(form.scheduleLength);
        if (!Number.isInteger(n) || n < 1) {
            errors.schedule_length = "factorial sessions need a schedule length >= 1";
        }
    }
    if (form.seed.trim() !== "" && !Number.isInteger(Number(form.seed))) {
        errors.seed = "seed must be an integer";
    }
    return errors;
}
// Mirror of the observation 422 rules. The lifetime-vs-tau check is the one
// that matters in the lab: a unit that outlived tau is a censored run.
export function validateObservation(entry) {
    const errors = {};
    const tau = Number(entry.tau);
    if (!Number.isFinite(tau) || !(tau > 0)) {
        errors.tau = "tau must be a number > 0";
    }
    if (entry.mode === "failure") {
        const lifetime = Number(entry.lifetime);
        if (entry.lifetime.trim() === "" || !Number.isFinite(lifetime)) {
            errors.lifetime = "enter the observed failure time";
        }
        else if (!(lifetime > 0)) {
            errors.lifetime = "lifetime must be > 0";
        }
        else if (Number.isFinite(tau) && lifetime > tau) {
            errors.lifetime =
                "a failure cannot be recorded after tau; report a censored run instead";
        }
    }
    return errors;
}
