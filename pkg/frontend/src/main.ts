/** Browser entry point: pick the API base from the query string and boot. */

import { ProtocolApi } from "./api.js";
import { createApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? "http://127.0.0.1:8080";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

createApp(root, new ProtocolApi(apiBase));
