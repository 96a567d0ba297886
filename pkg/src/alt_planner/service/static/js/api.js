export class ApiError extends Error {
    constructor(status, detail) {
        super(typeof detail === "string" ? detail : `request failed (${status})`);
        this.status = status;
        this.detail = detail;
    }
    /** Field -> message map for 400 validation failures, if present. */
    fieldErrors() {
        const d = this.detail;
        return d && typeof d === "object" && d.errors ? d.errors : null;
    }
}
export function makeClient(base = "", fetchFn = (...args) => fetch(...args)) {
    async function request(method, path, body) {
        const init = { method, headers: {} };
        if (body !== undefined) {
            init.headers = { "Content-Type": "application/json" };
            init.body = JSON.stringify(body);
        }
        const response = await fetchFn(`${base}${path}`, init);
        const text = await response.text();
        const json = text ? JSON.parse(text) : null;
        if (!response.ok) {
            throw new ApiError(response.status, json ? json.detail : null);
        }
        return json;
    }
    return {
        createSession: (body) => request("POST", "/sessions", body),
        getSession: (id) => request("GET", `/sessions/${id}`),
        getRecommendation: (id) => request("GET", `/sessions/${id}/recommendation`),
        voidRecommendation: (id) => request("DELETE", `/sessions/${id}/recommendation`),
        postObservation: (id, body) => request("POST", `/sessions/${id}/observations`, body),
        exportSession: (id) => request("GET", `/sessions/${id}/export`),
    };
}
